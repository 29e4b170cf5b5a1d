#pragma once

// Electromechanical plant: L298P H-bridge, DC motor + gear pump, stepper with
// lead screw, and the two fin servos.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "softfish/errors.hpp"
#include "softfish/tail_actuator.hpp"

namespace softfish::drivetrain {

inline constexpr double kRatedVoltage = 12.0;    // V
inline constexpr double kRatedFlow = 2.0;        // L/min at rated voltage
inline constexpr double kHydraulicTau = 0.05;    // s
inline constexpr double kPumpRatedCurrent = 0.8; // A at full duty
inline constexpr double kLogicCurrent = 0.3;     // A, servos + logic through the 5 V regulator

inline constexpr int kStepsPerRev = 200;           // 360 / (2 phases * 2 * 50 poles) = 1.8 deg
inline constexpr double kStepAngleDeg = 1.8;
inline constexpr double kLeadPerRev = 0.002;       // m
inline constexpr double kStepInterval = 0.005;     // s, measured on the bench trace

inline constexpr double kServoMinPulse = 1000.0;   // us
inline constexpr double kServoMaxPulse = 2000.0;   // us
inline constexpr double kServoFrame = 0.020;       // s
inline constexpr double kFinLimitDeg = 45.0;

// Result of an operation that saturates instead of failing.
template <class T>
struct Clamped {
  T value;
  bool clamped = false;
};

struct HBridgeInput {
  bool in1 = false;
  bool in2 = false;
  double enable_duty = 0.0;  // fraction of the window the enable line is high
};

// Mean output voltage. (1,0) drives positive, (0,1) negative, equal inputs brake.
inline double hbridge_output(double vbat, const HBridgeInput& in) {
  if (vbat < 0.0) {
    throw DomainError("battery voltage cannot be negative");
  }
  const double duty = std::clamp(in.enable_duty, 0.0, 1.0);
  if (in.in1 == in.in2) {
    return 0.0;
  }
  return (in.in1 ? 1.0 : -1.0) * duty * vbat;
}

inline Clamped<double> pump_flow(double v) {
  const bool over = std::abs(v) > kRatedVoltage;
  const double vc = std::clamp(v, -kRatedVoltage, kRatedVoltage);
  return {kRatedFlow * (vc / kRatedVoltage), over};
}

inline double pump_current(double duty) { return kPumpRatedCurrent * std::clamp(duty, 0.0, 1.0); }

struct PumpState {
  double v_cmd = 0.0;
  double delta_p_frac = 0.0;  // signed fraction of the saturated pressure difference
  double flow = 0.0;          // L/min
};

struct HydraulicOutput {
  PumpState state;
  double p_left;
  double p_right;
};

// Cavity pressures for a normalised drive level s in [-1, 1]. Positive s
// pressurises the left cavity to the strong bound and pulls the right one
// to the weak vacuum bound; negative s mirrors it.
inline std::pair<double, double> cavity_pressures(double s) {
  constexpr double strong = actuator::kMaxPressure;
  constexpr double weak = -actuator::kMinPressure;
  if (s >= 0.0) {
    return {strong * s, -weak * s};
  }
  return {weak * s, -strong * s};
}

// First-order lag of the pressure difference toward v_cmd / 12.
inline HydraulicOutput hydraulic_update(const PumpState& p, double v_cmd, double dt,
                                        double tau = kHydraulicTau) {
  if (!(dt > 0.0)) {
    throw DomainError("hydraulic step needs dt > 0");
  }
  const double target = std::clamp(v_cmd / kRatedVoltage, -1.0, 1.0);
  const double alpha = -std::expm1(-dt / tau);
  PumpState next = p;
  next.v_cmd = v_cmd;
  next.delta_p_frac = std::clamp(p.delta_p_frac + (target - p.delta_p_frac) * alpha, -1.0, 1.0);
  next.flow = pump_flow(v_cmd).value;
  const auto [pl, pr] = cavity_pressures(next.delta_p_frac);
  return {next, pl, pr};
}

struct StepperState {
  int position = 0;  // full steps
  int target = 0;
  int phase = 0;     // 0..3, full-step coil sequence
  double step_interval = kStepInterval;
  std::int64_t elapsed_us = 0;  // time since the last executed step
};

// Advance by one simulation tick. At most one full step per elapsed interval.
inline StepperState stepper_tick(StepperState s, double dt) {
  if (s.position == s.target) {
    s.elapsed_us = 0;
    return s;
  }
  const auto interval_us = static_cast<std::int64_t>(std::llround(s.step_interval * 1e6));
  s.elapsed_us += static_cast<std::int64_t>(std::llround(dt * 1e6));
  if (s.elapsed_us >= interval_us) {
    s.elapsed_us -= interval_us;
    const int dir = s.target > s.position ? 1 : -1;
    s.position += dir;
    s.phase = (s.phase + dir + 4) % 4;
  }
  return s;
}

inline double step_angle_deg(int steps) { return kStepAngleDeg * steps; }

inline double leadscrew_position(int steps) {
  return static_cast<double>(steps) / kStepsPerRev * kLeadPerRev;
}

struct ServoState {
  double fin_angle = 0.0;  // deg, 0 = neutral
  double pulse = 1500.0;   // us
};

inline Clamped<double> servo_pulse(double fin_angle) {
  const bool out = std::abs(fin_angle) > kFinLimitDeg;
  const double a = std::clamp(fin_angle, -kFinLimitDeg, kFinLimitDeg);
  return {kServoMinPulse + (a + kFinLimitDeg) / (2.0 * kFinLimitDeg) *
                               (kServoMaxPulse - kServoMinPulse),
          out};
}

// The firmware writes servo angles 0..90; logical 0 deg sits at 45.
inline double servo_write_angle(double fin_angle) { return fin_angle + kFinLimitDeg; }

inline ServoState command_servo(double fin_angle) {
  const auto p = servo_pulse(fin_angle);
  return {std::clamp(fin_angle, -kFinLimitDeg, kFinLimitDeg), p.value};
}

} // namespace softfish::drivetrain
