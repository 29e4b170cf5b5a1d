#pragma once

// The whole fish advanced at the 1 ms controller tick: controller -> H-bridge
// -> pump/hydraulics -> tail curvature -> thrust and turning bias; stepper ->
// movable mass; servos -> fins; vehicle dynamics; battery and sensors.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <tuple>
#include <utility>

#include "softfish/config.hpp"
#include "softfish/controller.hpp"
#include "softfish/drivetrain.hpp"
#include "softfish/sensors.hpp"
#include "softfish/tail_actuator.hpp"
#include "softfish/telemetry.hpp"
#include "softfish/vehicle.hpp"

namespace softfish {

class World {
public:
  explicit World(SimConfig cfg = {}, std::uint64_t seed = 0)
      : cfg_(std::move(cfg)),
        imu_cfg_(cfg_.imu.accel_scale, cfg_.imu.gyro_scale),
        bias_(static_cast<std::size_t>(std::llround(cfg_.hydro.tail_bias_window / control::kTick))),
        rng_(seed) {
    cfg_.validate();
    ctrl_.a_count = cfg_.initial.envelope_phase;
    battery_.capacity = cfg_.battery_capacity_mah;
    vehicle_.depth = cfg_.initial.depth;
    vehicle_.u = cfg_.initial.surge;
    kalman_ = sensors::make_kalman_state();
  }

  // Key presses take effect at the current tick boundary.
  void press_key(int key) {
    ctrl_ = control::handle_key(ctrl_, key);
    fin_l_ = drivetrain::command_servo(ctrl_.fin_cmd.first);
    fin_r_ = drivetrain::command_servo(ctrl_.fin_cmd.second);
  }

  void step() {
    if (halted_) {
      return;
    }
    constexpr double dt = control::kTick;

    const auto tick = control::tick_1ms(ctrl_, cfg_.waveform);
    ctrl_ = tick.state;
    last_pins_ = tick.hbridge;
    // The pump sees the window-averaged drive.
    const auto drive = control::window_input(ctrl_);
    motor_voltage_ = drivetrain::hbridge_output(battery_.voltage, drive);

    const auto hyd = drivetrain::hydraulic_update(pump_, motor_voltage_, dt, cfg_.hydraulic_tau);
    pump_ = hyd.state;
    const double kappa_prev = tail_.curvature;
    tail_ = actuator::solve_state(cfg_.geometry, cfg_.material, hyd.p_left, hyd.p_right,
                                  kappa_prev);
    const double kappa_rate = (tail_.curvature - kappa_prev) / dt;
    bias_.push(tail_.curvature);

    stepper_.target = ctrl_.stepper_target;
    stepper_ = drivetrain::stepper_tick(stepper_, dt);
    fin_l_ = drivetrain::command_servo(ctrl_.fin_cmd.first);
    fin_r_ = drivetrain::command_servo(ctrl_.fin_cmd.second);

    const double mass_x = drivetrain::leadscrew_position(stepper_.position);
    const auto fins = vehicle::fin_forces(vehicle_.u, fin_l_.fin_angle, fin_r_.fin_angle, cfg_.hydro);
    vehicle::Forces f;
    f.thrust = vehicle::tail_thrust(kappa_rate, cfg_.geometry.length, cfg_.hydro);
    f.lift = fins.lift;
    f.pitch_moment = fins.pitch_moment + vehicle::cog_pitch_moment(mass_x, cfg_.hydro);
    f.yaw_moment = fins.yaw_moment + vehicle::tail_yaw_moment(bias_.bias(), cfg_.hydro);
    vehicle_ = vehicle::step_dynamics(vehicle_, f, cfg_.hydro, dt);

    current_ = drivetrain::pump_current(drive.enable_duty) + drivetrain::kLogicCurrent;
    energy_j_ += battery_.voltage * current_ * dt;
    const auto bat = control::battery_update(battery_, current_, dt);
    battery_ = bat.state;
    halted_ = bat.halted;

    update_attitude_estimate(dt);
    ++t_ms_;
  }

  TelemetryRecord record() const {
    constexpr double deg = 180.0 / std::numbers::pi;
    TelemetryRecord r;
    r.t_ms = t_ms_;
    r.mode = ctrl_.mode;
    r.x = vehicle_.x;
    r.y = vehicle_.y;
    r.depth = vehicle_.depth;
    r.yaw_deg = vehicle_.yaw * deg;
    r.pitch_deg = vehicle_.pitch * deg;
    r.surge = vehicle_.u;
    r.tail_kappa = tail_.curvature;
    r.p_left = tail_.p_left;
    r.p_right = tail_.p_right;
    r.stepper_steps = stepper_.position;
    r.mass_x_mm = drivetrain::leadscrew_position(stepper_.position) * 1e3;
    r.fin_l_deg = fin_l_.fin_angle;
    r.fin_r_deg = fin_r_.fin_angle;
    r.vbat = battery_.voltage;
    r.current_a = current_;
    r.adc_current = sensors::current_digital(cfg_.current_mode, current_);
    r.soc = battery_.soc;
    r.water_low = sensors::water_sensor(vehicle_.depth) == sensors::Logic::Low;
    const actuator::FlexPair flex{10e3, 10e3, cfg_.flex_kappa_max};
    std::tie(r.flex_ra, r.flex_rb) = actuator::flex_resistances(flex, tail_.curvature);
    return r;
  }

  std::int64_t time_ms() const noexcept { return t_ms_; }
  bool halted() const noexcept { return halted_; }
  double energy_joules() const noexcept { return energy_j_; }

  const SimConfig& config() const noexcept { return cfg_; }
  const control::ControllerState& controller() const noexcept { return ctrl_; }
  const drivetrain::HBridgeInput& pins() const noexcept { return last_pins_; }
  const drivetrain::StepperState& stepper() const noexcept { return stepper_; }
  const actuator::ActuatorState& tail() const noexcept { return tail_; }
  const vehicle::VehicleState& body() const noexcept { return vehicle_; }
  const control::BatteryState& battery() const noexcept { return battery_; }
  double motor_voltage() const noexcept { return motor_voltage_; }
  double curvature_bias() const { return bias_.bias(); }
  const sensors::ImuSample& imu() const noexcept { return imu_; }
  const sensors::Attitude& complementary_estimate() const noexcept { return comp_; }
  const sensors::KalmanAxisState& kalman_pitch() const noexcept { return kalman_; }

private:
  void update_attitude_estimate(double dt) {
    std::array<double, 6> noise{};
    if (cfg_.imu.accel_noise_g > 0.0 || cfg_.imu.gyro_noise_dps > 0.0) {
      std::normal_distribution<double> n(0.0, 1.0);
      for (int i = 0; i < 3; ++i) noise[i] = cfg_.imu.accel_noise_g * n(rng_);
      for (int i = 3; i < 6; ++i) noise[i] = cfg_.imu.gyro_noise_dps * n(rng_);
    }
    imu_ = vehicle::emit_imu(vehicle_, imu_cfg_, noise);
    const auto accel_att = sensors::attitude_from_sample(imu_cfg_, imu_);
    const double roll_rate = sensors::gyro_raw_to_dps(imu_cfg_, imu_.gx);
    const double pitch_rate = sensors::gyro_raw_to_dps(imu_cfg_, imu_.gy);
    comp_ = sensors::complementary_update(comp_, roll_rate, pitch_rate, accel_att, dt,
                                          cfg_.filters.complementary_alpha);
    kalman_ = sensors::kalman_update(kalman_, pitch_rate, accel_att.pitch, dt, cfg_.filters.kalman);
  }

  SimConfig cfg_;
  sensors::ImuConfig imu_cfg_;
  control::ControllerState ctrl_{};
  drivetrain::HBridgeInput last_pins_{};
  drivetrain::PumpState pump_{};
  actuator::ActuatorState tail_{};
  vehicle::CurvatureBias bias_;
  drivetrain::StepperState stepper_{};
  drivetrain::ServoState fin_l_{};
  drivetrain::ServoState fin_r_{};
  vehicle::VehicleState vehicle_{};
  control::BatteryState battery_{};
  sensors::ImuSample imu_{};
  sensors::Attitude comp_{};
  sensors::KalmanAxisState kalman_{};
  std::mt19937_64 rng_;
  double motor_voltage_ = 0.0;
  double current_ = drivetrain::kLogicCurrent;
  double energy_j_ = 0.0;
  std::int64_t t_ms_ = 0;
  bool halted_ = false;
};

} // namespace softfish
