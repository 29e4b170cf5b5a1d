#pragma once

// Batch runs: a JSON scenario of timed key presses, stepped at 1 ms, with
// decimated telemetry handed to a sink as it is produced.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "softfish/config.hpp"
#include "softfish/errors.hpp"
#include "softfish/simulation.hpp"
#include "softfish/telemetry.hpp"

namespace softfish {

struct KeyEvent {
  std::int64_t t_ms = 0;
  int key = 1;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::int64_t duration_ms = 0;
  std::vector<KeyEvent> events;  // sorted by t_ms; ties keep file order
};

namespace detail {
// Line of the n-th occurrence of `"key"` in the text; best effort for diagnostics.
inline std::size_t line_of_key(const std::string& text, const std::string& key,
                               std::size_t occurrence = 0) {
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = 0;
  for (std::size_t i = 0;; ++i) {
    pos = text.find(needle, pos);
    if (pos == std::string::npos) return 0;
    if (i == occurrence) return line_of(text, pos);
    pos += needle.size();
  }
}
} // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  const nlohmann::json j = detail::parse_json(text);
  auto fail = [&](const std::string& msg, const std::string& field, std::size_t occurrence = 0) {
    const auto leaf = field.substr(field.find_last_of('.') + 1);
    throw ParseError(msg, detail::line_of_key(text, leaf, occurrence), field);
  };
  if (!j.is_object()) {
    throw ParseError("scenario must be a JSON object", 1, "");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "seed" && it.key() != "duration_ms" && it.key() != "events") {
      fail("unknown key", it.key());
    }
  }
  Scenario sc;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed must be an unsigned integer", "seed");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  if (!j.contains("duration_ms")) {
    throw ParseError("missing duration_ms", 0, "duration_ms");
  }
  if (!j["duration_ms"].is_number_integer() || j["duration_ms"].get<std::int64_t>() <= 0) {
    fail("duration_ms must be a positive integer", "duration_ms");
  }
  sc.duration_ms = j["duration_ms"].get<std::int64_t>();

  if (j.contains("events")) {
    const auto& ev = j["events"];
    if (!ev.is_array()) fail("events must be an array", "events");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string base = "events[" + std::to_string(i) + "]";
      const auto& e = ev[i];
      if (!e.is_object() || !e.contains("t_ms") || !e.contains("key")) {
        throw ParseError("event needs t_ms and key", detail::line_of_key(text, "t_ms", i), base);
      }
      if (!e["t_ms"].is_number_integer()) fail("t_ms must be an integer", base + ".t_ms", i);
      if (!e["key"].is_number_integer()) fail("key must be an integer", base + ".key", i);
      KeyEvent k{e["t_ms"].get<std::int64_t>(), e["key"].get<int>()};
      if (k.t_ms < 0 || k.t_ms > sc.duration_ms) {
        fail("t_ms outside [0, duration_ms]", base + ".t_ms", i);
      }
      if (k.key < 1 || k.key > 5) fail("key must be 1..5", base + ".key", i);
      if (!sc.events.empty() && k.t_ms < sc.events.back().t_ms) {
        fail("events must be sorted by t_ms", base + ".t_ms", i);
      }
      sc.events.push_back(k);
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(detail::slurp(path));
}

struct RunSummary {
  std::size_t records = 0;
  std::int64_t simulated_ms = 0;
  double distance_m = 0.0;     // straight-line displacement from the start
  double path_length_m = 0.0;
  double net_yaw_rad = 0.0;
  double energy_j = 0.0;
  bool halted = false;         // battery emptied
  std::optional<std::string> fault;

  nlohmann::json to_json() const {
    nlohmann::json j{{"records", records},   {"simulated_ms", simulated_ms},
                     {"distance_m", distance_m}, {"path_length_m", path_length_m},
                     {"net_yaw_rad", net_yaw_rad}, {"energy_j", energy_j},
                     {"halted", halted}};
    if (fault) j["fault"] = *fault;
    return j;
  }
};

using TelemetrySink = std::function<void(const TelemetryRecord&)>;

// Steps the fish for sc.duration_ms ticks. Events due at a tick are applied
// before that tick's record is taken, so an event at t=0 shows in the first row.
inline RunSummary run_scenario(const Scenario& sc, const SimConfig& cfg, int decimation_ms,
                               const TelemetrySink& sink) {
  if (decimation_ms <= 0) {
    throw DomainError("decimation must be at least 1 ms");
  }
  World world(cfg, sc.seed);
  RunSummary sum;
  const auto start = world.body();
  double prev_x = start.x, prev_y = start.y, prev_d = start.depth;
  std::size_t next_event = 0;

  auto emit = [&](const TelemetryRecord& r) {
    sink(r);
    ++sum.records;
  };

  try {
    for (std::int64_t t = 0; t < sc.duration_ms; ++t) {
      while (next_event < sc.events.size() && sc.events[next_event].t_ms <= t) {
        world.press_key(sc.events[next_event].key);
        ++next_event;
      }
      if (t % decimation_ms == 0) {
        emit(world.record());
      }
      world.step();
      const auto& b = world.body();
      sum.path_length_m += std::hypot(b.x - prev_x, b.y - prev_y, b.depth - prev_d);
      prev_x = b.x;
      prev_y = b.y;
      prev_d = b.depth;
      if (world.halted()) {
        sum.halted = true;
        emit(world.record());
        break;
      }
    }
  } catch (const SimulationFault& e) {
    sum.fault = std::string(e.what()) + " at t_ms=" + std::to_string(world.time_ms()) + ": " +
                e.snapshot();
  }
  const auto& b = world.body();
  sum.simulated_ms = world.time_ms();
  sum.distance_m = std::hypot(b.x - start.x, b.y - start.y, b.depth - start.depth);
  sum.net_yaw_rad = b.yaw - start.yaw;
  sum.energy_j = world.energy_joules();
  return sum;
}

// CSV convenience: header, one row per record.
inline RunSummary run_scenario_csv(const Scenario& sc, const SimConfig& cfg, int decimation_ms,
                                   std::ostream& out) {
  out << csv_header() << '\n';
  return run_scenario(sc, cfg, decimation_ms,
                      [&](const TelemetryRecord& r) { out << csv_row(r) << '\n'; });
}

} // namespace softfish
