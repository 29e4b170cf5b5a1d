// softfish: batch scenario runs, live serving, and actuator calibration.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "softfish/config.hpp"
#include "softfish/scenario.hpp"
#include "softfish/service.hpp"
#include "softfish/tail_actuator.hpp"

namespace {

softfish::SimConfig config_or_default(const std::string& path) {
  return path.empty() ? softfish::SimConfig{} : softfish::load_config(path);
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int cmd_run(const std::string& scenario, const std::string& out, int decimation,
            const std::string& config) {
  const auto cfg = config_or_default(config);
  const auto sc = softfish::load_scenario(scenario);
  std::ofstream os(out, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot write " << out << "\n";
    return 1;
  }
  const auto sum = softfish::run_scenario_csv(sc, cfg, decimation, os);
  std::cout << sum.to_json().dump(2) << "\n";
  if (sum.fault) {
    std::cerr << "simulation fault: " << *sum.fault << "\n";
    return 3;
  }
  return 0;
}

int cmd_serve(const std::string& host, int port, double speed, int frame_ms,
              const std::string& config, std::uint64_t seed) {
  softfish::service::LiveSession session(config_or_default(config), {speed, frame_ms, seed});
  softfish::service::Server server(session);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int bound = server.start(host, port);
  std::cerr << "serving on http://" << host << ":" << bound
            << "  (GET /stream, POST /command)\n";
  while (!g_stop && server.running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  server.stop();
  return 0;
}

int cmd_calibrate(const std::string& config) {
  const auto cfg = config_or_default(config);
  const auto cal = softfish::actuator::calibrate_gain(cfg.geometry, cfg.material);
  auto g = cfg.geometry;
  g.calibration_gain = cal.gain;
  const auto st = softfish::actuator::solve_state(g, cfg.material, softfish::actuator::kMaxPressure,
                                                  softfish::actuator::kMinPressure);
  nlohmann::json j{{"calibration_gain", cal.gain},
                   {"target_curvature", cal.target_curvature},
                   {"tip_deflection", st.tip_deflection},
                   {"flex_kappa_max", st.curvature}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cal.gain);
  std::cout << j.dump(2) << "\n";
  std::cerr << "calibration_gain = " << buf << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft robotic fish simulator"};
  app.require_subcommand(1);

  std::string scenario, out, config;
  int decimation = 10;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV telemetry");
  run->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Telemetry CSV path")->required();
  run->add_option("--decimation-ms", decimation, "Record interval")->check(CLI::PositiveNumber);
  run->add_option("--config", config, "Config JSON")->check(CLI::ExistingFile);

  int port = 8080;
  double speed = 1.0;
  int frame_ms = 50;
  std::string host = "127.0.0.1";
  std::uint64_t seed = 0;
  auto* serve = app.add_subcommand("serve", "Run the live simulation for console clients");
  serve->add_option("--port", port, "TCP port (0 picks one)")->required()->check(CLI::Range(0, 65535));
  serve->add_option("--speed", speed, "Simulated seconds per wall second")
      ->check(CLI::PositiveNumber);
  serve->add_option("--frame-ms", frame_ms, "Simulated ms between frames")
      ->check(CLI::PositiveNumber);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--seed", seed, "Sensor noise seed");
  serve->add_option("--config", config, "Config JSON")->check(CLI::ExistingFile);

  auto* cal = app.add_subcommand("calibrate-actuator", "Fit the actuator gain to the 40 mm anchor");
  cal->add_option("--config", config, "Config JSON")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, out, decimation, config);
    if (*serve) return cmd_serve(host, port, speed, frame_ms, config, seed);
    if (*cal) return cmd_calibrate(config);
  } catch (const softfish::ParseError& e) {
    std::cerr << "parse error";
    if (e.line()) std::cerr << " at line " << e.line();
    if (!e.field().empty()) std::cerr << " (" << e.field() << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
