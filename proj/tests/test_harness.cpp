#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "softfish/config.hpp"
#include "softfish/scenario.hpp"

using namespace softfish;

namespace {

// Minimal CSV reader written against the documented schema only.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
  double num(std::size_t r, const std::string& name) const {
    const std::string& s = rows[r][col(name)];
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("not a number: " + s);
    return v;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) return t;
  t.header = split(line);
  while (std::getline(is, line)) t.rows.push_back(split(line));
  return t;
}

std::string run_csv(const Scenario& sc, int dec = 10, const SimConfig& cfg = {},
                    RunSummary* sum = nullptr) {
  std::ostringstream os;
  auto s = run_scenario_csv(sc, cfg, dec, os);
  if (sum) *sum = s;
  return os.str();
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError("", 0, "");
}

} // namespace

TEST(Scenario, ParsesValidDocument) {
  const auto sc = parse_scenario(R"({"seed": 3, "duration_ms": 500,
      "events": [{"t_ms": 0, "key": 4}, {"t_ms": 100, "key": 1}, {"t_ms": 100, "key": 2}]})");
  EXPECT_EQ(sc.seed, 3u);
  EXPECT_EQ(sc.duration_ms, 500);
  ASSERT_EQ(sc.events.size(), 3u);
  EXPECT_EQ(sc.events[2].key, 2);
}

TEST(Scenario, ErrorsCarryLineAndField) {
  const auto bad_key = parse_failure("{\n  \"duration_ms\": 100,\n  \"events\": [\n    {\"t_ms\": 1, \"key\": 1},\n    {\"t_ms\": 2, \"key\": 9}\n  ]\n}");
  EXPECT_EQ(bad_key.field(), "events[1].key");
  EXPECT_EQ(bad_key.line(), 5u);

  const auto late = parse_failure("{\"duration_ms\": 100, \"events\": [{\"t_ms\": 200, \"key\": 1}]}");
  EXPECT_EQ(late.field(), "events[0].t_ms");

  const auto unsorted = parse_failure(
      "{\"duration_ms\": 100, \"events\": [{\"t_ms\": 50, \"key\": 1}, {\"t_ms\": 10, \"key\": 1}]}");
  EXPECT_EQ(unsorted.field(), "events[1].t_ms");

  const auto missing = parse_failure("{\"seed\": 1}");
  EXPECT_EQ(missing.field(), "duration_ms");

  const auto typo = parse_failure("{\"duration_ms\": 10,\n \"evnets\": []}");
  EXPECT_EQ(typo.field(), "evnets");
  EXPECT_EQ(typo.line(), 2u);

  const auto syntax = parse_failure("{\n\"duration_ms\": 10,\n\"events\": [\n}");
  EXPECT_EQ(syntax.line(), 4u);

  EXPECT_EQ(parse_failure("{\"duration_ms\": -5}").field(), "duration_ms");
  EXPECT_EQ(parse_failure("{\"duration_ms\": 5, \"seed\": -1}").field(), "seed");
  EXPECT_EQ(parse_failure("[1, 2]").field(), "");
}

TEST(Run, OneSecondGivesHundredStraightRecords) {
  Scenario sc;
  sc.duration_ms = 1000;
  RunSummary sum;
  const auto t = read_csv(run_csv(sc, 10, {}, &sum));
  ASSERT_EQ(t.rows.size(), 100u);
  EXPECT_EQ(sum.records, 100u);
  EXPECT_EQ(sum.simulated_ms, 1000);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    EXPECT_EQ(t.rows[r][t.col("mode")], "Straight");
    EXPECT_EQ(t.num(r, "t_ms"), 10.0 * r);
  }
  EXPECT_FALSE(sum.fault);
  EXPECT_GT(sum.energy_j, 0.0);
  EXPECT_GT(sum.distance_m, 0.0);
  EXPECT_GE(sum.path_length_m, sum.distance_m);
}

TEST(Run, KeyAtTimeZeroShowsInFirstRecord) {
  Scenario sc;
  sc.duration_ms = 100;
  sc.events = {{0, 4}};
  const auto t = read_csv(run_csv(sc));
  ASSERT_FALSE(t.rows.empty());
  EXPECT_EQ(t.rows[0][t.col("mode")], "ElevatorUp");
}

TEST(Run, EventsApplyAtTheirTick) {
  Scenario sc;
  sc.duration_ms = 100;
  sc.events = {{35, 2}, {35, 3}, {70, 5}};
  const auto t = read_csv(run_csv(sc, 5));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double ms = t.num(r, "t_ms");
    const auto& mode = t.rows[r][t.col("mode")];
    if (ms < 35) EXPECT_EQ(mode, "Straight");
    else if (ms < 70) EXPECT_EQ(mode, "RightTurn");
    else EXPECT_EQ(mode, "ElevatorDown");
  }
}

TEST(Run, CsvIsByteIdenticalAcrossRuns) {
  Scenario sc;
  sc.seed = 42;
  sc.duration_ms = 4000;
  sc.events = {{0, 1}, {1000, 2}, {2500, 4}};
  SimConfig cfg;
  cfg.imu.accel_noise_g = 0.01;
  cfg.imu.gyro_noise_dps = 0.2;
  EXPECT_EQ(run_csv(sc, 10, cfg), run_csv(sc, 10, cfg));
}

TEST(Run, CsvSchemaIsStable) {
  Scenario sc;
  sc.duration_ms = 2000;
  sc.events = {{0, 2}};
  const auto t = read_csv(run_csv(sc, 7));
  const std::vector<std::string> expected = {
      "t_ms", "mode", "x", "y", "depth", "yaw_deg", "pitch_deg", "surge", "tail_kappa", "p_left",
      "p_right", "stepper_steps", "mass_x_mm", "fin_l_deg", "fin_r_deg", "vbat", "current_a",
      "adc_current", "soc", "water_low", "flex_ra", "flex_rb"};
  EXPECT_EQ(t.header, expected);
  EXPECT_EQ(t.rows.size(), 286u);  // ceil(2000 / 7)
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ASSERT_EQ(t.rows[r].size(), expected.size());
    for (const auto& name : expected) {
      if (name == "mode") continue;
      EXPECT_TRUE(std::isfinite(t.num(r, name))) << name;
    }
    const double adc = t.num(r, "adc_current");
    EXPECT_GE(adc, 0);
    EXPECT_LE(adc, 1023);
    EXPECT_GE(t.num(r, "flex_ra"), 10e3);
    EXPECT_LE(t.num(r, "flex_rb"), 110e3);
    EXPECT_EQ(t.num(r, "fin_l_deg"), 30.0);
    EXPECT_EQ(t.num(r, "fin_r_deg"), -30.0);
  }
}

TEST(Run, RecordMatchesWorldState) {
  World w;
  w.press_key(5);
  for (int i = 0; i < 1234; ++i) w.step();
  const auto r = w.record();
  EXPECT_EQ(r.t_ms, 1234);
  EXPECT_EQ(r.stepper_steps, w.stepper().position);
  EXPECT_DOUBLE_EQ(r.mass_x_mm, w.stepper().position * 0.01);
  EXPECT_EQ(r.depth, w.body().depth);
  EXPECT_EQ(r.water_low, true);
  EXPECT_EQ(r.adc_current, sensors::current_digital(sensors::CurrentMode::PaperEq, r.current_a));
  const auto t = read_csv(csv_header() + "\n" + csv_row(r) + "\n");
  EXPECT_NEAR(t.num(0, "depth"), r.depth, 1e-8 * std::abs(r.depth));
  EXPECT_EQ(t.rows[0][t.col("mode")], "ElevatorDown");
}

TEST(Run, FaultStopsWithPartialOutput) {
  Scenario sc;
  sc.duration_ms = 2000;
  SimConfig cfg;
  cfg.hydro.k_thrust = 1e308;
  RunSummary sum;
  const auto t = read_csv(run_csv(sc, 10, cfg, &sum));
  ASSERT_TRUE(sum.fault.has_value());
  EXPECT_NE(sum.fault->find("non-finite"), std::string::npos);
  EXPECT_LT(sum.simulated_ms, 2000);
  EXPECT_GT(t.rows.size(), 0u);
  EXPECT_TRUE(sum.to_json().contains("fault"));
}

TEST(Run, BatteryHaltEndsRun) {
  Scenario sc;
  sc.duration_ms = 20000;
  SimConfig cfg;
  cfg.battery_capacity_mah = 1.0;  // 3.6 C: empties within seconds
  RunSummary sum;
  run_csv(sc, 100, cfg, &sum);
  EXPECT_TRUE(sum.halted);
  EXPECT_LT(sum.simulated_ms, 20000);
}

TEST(Run, RejectsZeroDecimation) {
  Scenario sc;
  sc.duration_ms = 10;
  EXPECT_THROW(run_csv(sc, 0), DomainError);
}

TEST(Config, DefaultsRoundTripThroughFile) {
  const auto cfg = load_config(std::string(SOFTFISH_TEST_DATA) + "/default_config.json");
  const SimConfig def;
  EXPECT_EQ(cfg.material.c1, def.material.c1);
  EXPECT_EQ(cfg.geometry.calibration_gain, def.geometry.calibration_gain);
  EXPECT_EQ(cfg.flex_kappa_max, def.flex_kappa_max);
  EXPECT_EQ(cfg.hydro.k_thrust, def.hydro.k_thrust);
  EXPECT_EQ(cfg.waveform.omega, def.waveform.omega);
  EXPECT_EQ(cfg.filters.kalman.r_measure, def.filters.kalman.r_measure);
  Scenario sc;
  sc.duration_ms = 500;
  EXPECT_EQ(run_csv(sc, 10, cfg), run_csv(sc, 10, def));
}

TEST(Config, PartialOverrides) {
  const auto cfg = config_from_json(nlohmann::json::parse(
      R"({"hydro": {"mass": 2.0}, "current_sense": "datasheet", "initial": {"depth": 1.5}})"));
  EXPECT_EQ(cfg.hydro.mass, 2.0);
  EXPECT_EQ(cfg.hydro.k_thrust, SimConfig{}.hydro.k_thrust);
  EXPECT_EQ(cfg.current_mode, sensors::CurrentMode::Datasheet);
  EXPECT_EQ(cfg.initial.depth, 1.5);
}

TEST(Config, RejectsUnknownAndInvalid) {
  auto field_of = [](const char* text) {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const ParseError& e) {
      return e.field();
    } catch (const DomainError& e) {
      return std::string("domain: ") + e.what();
    }
    return std::string("accepted");
  };
  EXPECT_EQ(field_of(R"({"hydro": {"mas": 2.0}})"), "config.hydro.mas");
  EXPECT_EQ(field_of(R"({"hydrodynamics": {}})"), "config.hydrodynamics");
  EXPECT_EQ(field_of(R"({"hydro": {"mass": "heavy"}})"), "config.hydro.mass");
  EXPECT_EQ(field_of(R"({"current_sense": "guess"})"), "config.current_sense");
  EXPECT_NE(field_of(R"({"hydro": {"mass": -1}})").find("domain"), std::string::npos);
  EXPECT_NE(field_of(R"({"imu": {"accel_scale": 3}})").find("domain"), std::string::npos);
  EXPECT_NE(field_of(R"({"initial": {"envelope_phase": 40}})").find("domain"), std::string::npos);
}

TEST(Telemetry, FrameCarriesEveryColumn) {
  const auto j = telemetry_frame(World{}.record());
  EXPECT_EQ(j["type"], "telemetry");
  for (auto name : kTelemetryColumns) EXPECT_TRUE(j.contains(std::string(name))) << name;
  EXPECT_EQ(j["mode"], "Straight");
  EXPECT_EQ(error_frame("x")["type"], "error");
}

TEST(Telemetry, NegativeZeroPrintsAsZero) {
  TelemetryRecord r;
  r.y = -0.0;
  r.yaw_deg = -0.0;
  const auto row = csv_row(r);
  EXPECT_EQ(row.find("-0,"), std::string::npos);
}
