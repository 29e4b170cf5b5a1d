#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "softfish/controller.hpp"

namespace softfish {

// One observable snapshot of the whole fish. Column order below is the CSV
// schema and must not change.
struct TelemetryRecord {
  std::int64_t t_ms = 0;
  control::Mode mode = control::Mode::Straight;
  double x = 0.0, y = 0.0, depth = 0.0;  // m
  double yaw_deg = 0.0, pitch_deg = 0.0;
  double surge = 0.0;        // m/s
  double tail_kappa = 0.0;   // 1/m
  double p_left = 0.0, p_right = 0.0;  // Pa
  int stepper_steps = 0;
  double mass_x_mm = 0.0;
  double fin_l_deg = 0.0, fin_r_deg = 0.0;
  double vbat = 0.0;         // V
  double current_a = 0.0;    // A
  int adc_current = 0;       // 0..1023
  double soc = 0.0;
  bool water_low = false;
  double flex_ra = 0.0, flex_rb = 0.0;  // ohm
};

inline constexpr std::array<std::string_view, 22> kTelemetryColumns = {
    "t_ms",      "mode",      "x",        "y",         "depth",         "yaw_deg",
    "pitch_deg", "surge",     "tail_kappa", "p_left",  "p_right",       "stepper_steps",
    "mass_x_mm", "fin_l_deg", "fin_r_deg", "vbat",     "current_a",     "adc_current",
    "soc",       "water_low", "flex_ra",  "flex_rb"};

inline constexpr std::size_t kTelemetryColumnCount = kTelemetryColumns.size();

inline std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kTelemetryColumnCount; ++i) {
    if (i) out += ',';
    out += kTelemetryColumns[i];
  }
  return out;
}

namespace detail {
// %.9g round-trips the printed value; -0 is folded to 0 so mirrored runs
// and reruns print identically.
inline void put_float(std::string& out, double v) {
  char buf[32];
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}
} // namespace detail

inline std::string csv_row(const TelemetryRecord& r) {
  std::string out;
  out.reserve(256);
  auto sep = [&] { out += ','; };
  out += std::to_string(r.t_ms);
  sep();
  out += control::mode_name(r.mode);
  for (double v : {r.x, r.y, r.depth, r.yaw_deg, r.pitch_deg, r.surge, r.tail_kappa, r.p_left,
                   r.p_right}) {
    sep();
    detail::put_float(out, v);
  }
  sep();
  out += std::to_string(r.stepper_steps);
  for (double v : {r.mass_x_mm, r.fin_l_deg, r.fin_r_deg, r.vbat, r.current_a}) {
    sep();
    detail::put_float(out, v);
  }
  sep();
  out += std::to_string(r.adc_current);
  sep();
  detail::put_float(out, r.soc);
  sep();
  out += r.water_low ? '1' : '0';
  sep();
  detail::put_float(out, r.flex_ra);
  sep();
  detail::put_float(out, r.flex_rb);
  return out;
}

inline nlohmann::json telemetry_frame(const TelemetryRecord& r) {
  return {{"type", "telemetry"},
          {"t_ms", r.t_ms},
          {"mode", std::string(control::mode_name(r.mode))},
          {"x", r.x},
          {"y", r.y},
          {"depth", r.depth},
          {"yaw_deg", r.yaw_deg},
          {"pitch_deg", r.pitch_deg},
          {"surge", r.surge},
          {"tail_kappa", r.tail_kappa},
          {"p_left", r.p_left},
          {"p_right", r.p_right},
          {"stepper_steps", r.stepper_steps},
          {"mass_x_mm", r.mass_x_mm},
          {"fin_l_deg", r.fin_l_deg},
          {"fin_r_deg", r.fin_r_deg},
          {"vbat", r.vbat},
          {"current_a", r.current_a},
          {"adc_current", r.adc_current},
          {"soc", r.soc},
          {"water_low", r.water_low},
          {"flex_ra", r.flex_ra},
          {"flex_rb", r.flex_rb}};
}

inline nlohmann::json error_frame(const std::string& msg) {
  return {{"type", "error"}, {"msg", msg}};
}

} // namespace softfish
