#pragma once

// Simulation configuration: every tunable coefficient, JSON-loadable.
// Any key may be omitted; unknown keys are rejected so typos surface early.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "softfish/controller.hpp"
#include "softfish/drivetrain.hpp"
#include "softfish/errors.hpp"
#include "softfish/hyperelastic.hpp"
#include "softfish/sensors.hpp"
#include "softfish/tail_actuator.hpp"
#include "softfish/vehicle.hpp"

namespace softfish {

struct ImuSettings {
  int accel_scale = 2;
  int gyro_scale = 250;
  double accel_noise_g = 0.0;   // 1-sigma, seeded
  double gyro_noise_dps = 0.0;
};

struct FilterSettings {
  double complementary_alpha = sensors::kDefaultComplementaryAlpha;
  sensors::KalmanTuning kalman{};
};

struct InitialConditions {
  double depth = 0.5;       // m
  double surge = 0.0;       // m/s
  int envelope_phase = 0;   // starting a_count of the controller
};

struct SimConfig {
  hyperelastic::MaterialParams material = hyperelastic::kStableSilicone;
  actuator::ActuatorGeometry geometry{};
  double flex_kappa_max = actuator::FlexPair{}.kappa_max;
  double hydraulic_tau = drivetrain::kHydraulicTau;
  control::WaveformParams waveform{};
  double battery_capacity_mah = control::kCapacityMah;
  vehicle::HydroParams hydro{};
  ImuSettings imu{};
  FilterSettings filters{};
  sensors::CurrentMode current_mode = sensors::CurrentMode::PaperEq;
  InitialConditions initial{};

  void validate() const {
    geometry.validate();
    waveform.validate();
    hydro.validate();
    sensors::ImuConfig(imu.accel_scale, imu.gyro_scale);
    if (!(flex_kappa_max > 0.0)) throw DomainError("flex.kappa_max must be positive");
    if (!(hydraulic_tau > 0.0)) throw DomainError("hydraulics.tau must be positive");
    if (!(battery_capacity_mah > 0.0)) throw DomainError("battery.capacity_mah must be positive");
    if (imu.accel_noise_g < 0.0 || imu.gyro_noise_dps < 0.0) {
      throw DomainError("noise sigmas must be non-negative");
    }
    if (initial.envelope_phase < 0 || initial.envelope_phase >= waveform.envelope_steps()) {
      throw DomainError("initial.envelope_phase outside the envelope");
    }
  }
};

namespace detail {

class JsonReader {
public:
  JsonReader(const nlohmann::json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ParseError("expected an object", 0, path_);
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("wrong type", 0, path_ + "." + key);
    }
  }

  JsonReader section(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    static const nlohmann::json empty = nlohmann::json::object();
    return JsonReader(it == obj_.end() ? empty : *it, path_ + "." + key);
  }

  // Rejects keys that were never asked for.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ParseError("unknown key", 0, path_ + "." + it.key());
      }
    }
  }

private:
  const nlohmann::json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

// 1-based line of a byte offset, for parser diagnostics.
inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_of(text, e.byte), "");
  }
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace detail

inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  {
    detail::JsonReader root(j, "config");
    {
      auto s = root.section("material");
      s.get("c1", c.material.c1);
      s.get("c2", c.material.c2);
      s.finish();
    }
    {
      auto s = root.section("actuator");
      s.get("length", c.geometry.length);
      s.get("half_thickness", c.geometry.half_thickness);
      s.get("width", c.geometry.width);
      s.get("cavity_area", c.geometry.cavity_area);
      s.get("moment_arm", c.geometry.moment_arm);
      s.get("n_segments", c.geometry.n_segments);
      s.get("calibration_gain", c.geometry.calibration_gain);
      s.get("flex_kappa_max", c.flex_kappa_max);
      s.finish();
    }
    {
      auto s = root.section("hydraulics");
      s.get("tau", c.hydraulic_tau);
      s.finish();
    }
    {
      auto s = root.section("waveform");
      s.get("v_a", c.waveform.v_a);
      s.get("v_a1", c.waveform.v_a1);
      s.get("v_a2", c.waveform.v_a2);
      s.get("omega", c.waveform.omega);
      s.finish();
    }
    {
      auto s = root.section("battery");
      s.get("capacity_mah", c.battery_capacity_mah);
      s.finish();
    }
    {
      auto s = root.section("hydro");
      auto& h = c.hydro;
      s.get("mass", h.mass);
      s.get("pitch_inertia", h.pitch_inertia);
      s.get("yaw_inertia", h.yaw_inertia);
      s.get("k_thrust", h.k_thrust);
      s.get("c_drag_surge", h.c_drag_surge);
      s.get("c_drag_heave", h.c_drag_heave);
      s.get("k_fin_lift", h.k_fin_lift);
      s.get("fin_arm", h.fin_arm);
      s.get("k_fin_yaw", h.k_fin_yaw);
      s.get("k_restore_pitch", h.k_restore_pitch);
      s.get("cog_moment_per_m", h.cog_moment_per_m);
      s.get("damping_q", h.damping_q);
      s.get("damping_r", h.damping_r);
      s.get("k_tail_yaw", h.k_tail_yaw);
      s.get("tail_bias_window", h.tail_bias_window);
      s.finish();
    }
    {
      auto s = root.section("imu");
      s.get("accel_scale", c.imu.accel_scale);
      s.get("gyro_scale", c.imu.gyro_scale);
      s.get("accel_noise_g", c.imu.accel_noise_g);
      s.get("gyro_noise_dps", c.imu.gyro_noise_dps);
      s.finish();
    }
    {
      auto s = root.section("filters");
      s.get("complementary_alpha", c.filters.complementary_alpha);
      s.get("kalman_q_angle", c.filters.kalman.q_angle);
      s.get("kalman_q_bias", c.filters.kalman.q_bias);
      s.get("kalman_r", c.filters.kalman.r_measure);
      s.finish();
    }
    {
      std::string mode;
      root.get("current_sense", mode);
      if (mode == "datasheet") {
        c.current_mode = sensors::CurrentMode::Datasheet;
      } else if (!mode.empty() && mode != "paper-eq") {
        throw ParseError("expected \"paper-eq\" or \"datasheet\"", 0, "config.current_sense");
      }
    }
    {
      auto s = root.section("initial");
      s.get("depth", c.initial.depth);
      s.get("surge", c.initial.surge);
      s.get("envelope_phase", c.initial.envelope_phase);
      s.finish();
    }
    root.finish();
  }
  c.validate();
  return c;
}

inline SimConfig load_config(const std::string& path) {
  const std::string text = detail::slurp(path);
  return config_from_json(detail::parse_json(text));
}

} // namespace softfish
