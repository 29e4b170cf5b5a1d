#pragma once

// Five-button open-loop swim controller. A 1 ms timer interrupt runs a
// 25-tick PWM window; every window the envelope phase advances by one step
// and the duty count is re-latched from a half-sine of the mode's amplitude.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "softfish/drivetrain.hpp"
#include "softfish/errors.hpp"

namespace softfish::control {

enum class Mode { Straight, LeftTurn, RightTurn, ElevatorUp, ElevatorDown };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Straight: return "Straight";
    case Mode::LeftTurn: return "LeftTurn";
    case Mode::RightTurn: return "RightTurn";
    case Mode::ElevatorUp: return "ElevatorUp";
    case Mode::ElevatorDown: return "ElevatorDown";
  }
  return "?";
}

inline constexpr int kWindowTicks = 25;
inline constexpr double kTick = 0.001;  // s
inline constexpr int kElevatorSteps = 600;  // 3 revolutions = 1080 deg
inline constexpr double kFinTurnDeg = 30.0;

struct WaveformParams {
  double v_a = 12.0;   // V, symmetric amplitude
  double v_a1 = 12.0;  // V, strong half-cycle of a turn
  double v_a2 = 1.92;  // V, weak half-cycle (4 of 25 counts)
  double omega = 2.0 * std::numbers::pi;  // rad/s

  void validate() const {
    if (!(v_a >= 0.0 && v_a1 >= 0.0 && v_a2 >= 0.0)) {
      throw DomainError("waveform amplitudes must be non-negative");
    }
    if (!(omega > 0.0)) {
      throw DomainError("fishtail frequency must be positive");
    }
  }

  // Amplitude in duty counts at the nominal 12 V supply.
  static int counts(double volts) {
    return static_cast<int>(std::lround(std::clamp(volts / drivetrain::kRatedVoltage, 0.0, 1.0) *
                                        kWindowTicks));
  }

  // Envelope steps per fishtail cycle (40 at 1 Hz). Always even.
  int envelope_steps() const {
    const double steps = 2.0 * std::numbers::pi / omega / (kWindowTicks * kTick);
    return std::max(2, 2 * static_cast<int>(std::lround(steps / 2.0)));
  }
};

enum class Polarity { Positive, Negative };

struct ControllerState {
  Mode mode = Mode::Straight;
  int t_count = 0;       // tick inside the PWM window, 0..24
  int a_count = 0;       // envelope phase, 0..envelope_steps-1
  int duty_counts = 0;   // latched at window start
  Polarity polarity = Polarity::Negative;
  int stepper_target = 0;
  std::pair<double, double> fin_cmd{0.0, 0.0};  // (left, right) deg
};

inline double polarity_sign(Polarity p) { return p == Polarity::Positive ? 1.0 : -1.0; }

class InvalidKey : public DomainError {
public:
  explicit InvalidKey(int key) : DomainError("key must be 1..5, got " + std::to_string(key)) {}
};

inline ControllerState handle_key(const ControllerState& st, int key) {
  ControllerState next = st;
  switch (key) {
    case 1:
      next.mode = Mode::Straight;
      next.stepper_target = 0;
      next.fin_cmd = {0.0, 0.0};
      break;
    case 2:
      next.mode = Mode::LeftTurn;
      next.stepper_target = 0;
      next.fin_cmd = {kFinTurnDeg, -kFinTurnDeg};
      break;
    case 3:
      next.mode = Mode::RightTurn;
      next.stepper_target = 0;
      next.fin_cmd = {-kFinTurnDeg, kFinTurnDeg};
      break;
    case 4:
      next.mode = Mode::ElevatorUp;
      next.stepper_target = -kElevatorSteps;
      next.fin_cmd = {-kFinTurnDeg, -kFinTurnDeg};
      break;
    case 5:
      next.mode = Mode::ElevatorDown;
      next.stepper_target = kElevatorSteps;
      next.fin_cmd = {kFinTurnDeg, kFinTurnDeg};
      break;
    default:
      throw InvalidKey(key);
  }
  return next;
}

// Peak duty counts for the (first, second) half of the envelope.
inline std::pair<int, int> half_cycle_amplitudes(Mode m, const WaveformParams& w) {
  const int sym = WaveformParams::counts(w.v_a);
  const int strong = WaveformParams::counts(w.v_a1);
  const int weak = WaveformParams::counts(w.v_a2);
  switch (m) {
    case Mode::LeftTurn: return {strong, weak};
    case Mode::RightTurn: return {weak, strong};
    default: return {sym, sym};
  }
}

// Duty count and polarity for envelope phase `a`.
inline std::pair<int, Polarity> envelope(Mode m, int a, const WaveformParams& w) {
  const int steps = w.envelope_steps();
  const int half = steps / 2;
  const auto [first, second] = half_cycle_amplitudes(m, w);
  const bool first_half = a < half;
  const int amplitude = first_half ? first : second;
  const double phase = static_cast<double>(a % half) / half;
  const int duty = static_cast<int>(amplitude * std::sin(std::numbers::pi * phase));
  return {std::clamp(duty, 0, kWindowTicks), first_half ? Polarity::Negative : Polarity::Positive};
}

struct TickOutput {
  drivetrain::HBridgeInput hbridge;  // pin levels during this millisecond
  ControllerState state;
};

// One timer interrupt. Duty and polarity are latched at the window's first
// tick, so a mode change mid-window shows up in the next window.
inline TickOutput tick_1ms(ControllerState st, const WaveformParams& w = {}) {
  if (st.t_count == 0) {
    const auto [duty, pol] = envelope(st.mode, st.a_count, w);
    st.duty_counts = duty;
    st.polarity = pol;
  }
  drivetrain::HBridgeInput out;
  out.in1 = st.polarity == Polarity::Positive;
  out.in2 = !out.in1;
  out.enable_duty = st.t_count < st.duty_counts ? 1.0 : 0.0;

  if (++st.t_count == kWindowTicks) {
    st.t_count = 0;
    st.a_count = (st.a_count + 1) % w.envelope_steps();
  }
  return {out, st};
}

// Window-averaged H-bridge input for the latched duty.
inline drivetrain::HBridgeInput window_input(const ControllerState& st) {
  return {st.polarity == Polarity::Positive, st.polarity == Polarity::Negative,
          static_cast<double>(st.duty_counts) / kWindowTicks};
}

inline double reconstruct_mean_voltage(int duty_counts, Polarity polarity, double vbat) {
  return polarity_sign(polarity) * static_cast<double>(duty_counts) / kWindowTicks * vbat;
}

// Continuous reference waveform the duty envelope approximates.
inline double reference_voltage(Mode m, double t, const WaveformParams& w = {}) {
  const double s = std::sin(w.omega * t);
  // Negative half first; the strong/weak split follows half_cycle_amplitudes.
  switch (m) {
    case Mode::LeftTurn: return s >= 0.0 ? -w.v_a1 * s : -w.v_a2 * s;
    case Mode::RightTurn: return s >= 0.0 ? -w.v_a2 * s : -w.v_a1 * s;
    default: return -w.v_a * s;
  }
}

inline constexpr double kCapacityMah = 3400.0;
inline constexpr double kVoltageEmpty = 9.0;
inline constexpr double kVoltageFull = 12.6;

struct BatteryState {
  double capacity = kCapacityMah;  // mAh
  double soc = 1.0;
  double voltage = kVoltageFull;
};

inline double battery_voltage(double soc) {
  return kVoltageEmpty + (kVoltageFull - kVoltageEmpty) * soc;
}

struct BatteryUpdate {
  BatteryState state;
  bool halted = false;  // pack reached empty during this step
};

// Coulomb counting with a linear open-circuit voltage.
inline BatteryUpdate battery_update(BatteryState b, double current, double dt) {
  if (current < 0.0) {
    throw DomainError("battery model only discharges");
  }
  if (!(dt > 0.0)) {
    throw DomainError("battery step needs dt > 0");
  }
  b.soc -= current * dt / (3600.0 * b.capacity / 1000.0);
  bool halted = false;
  if (b.soc <= 0.0) {
    b.soc = 0.0;
    halted = true;
  }
  b.voltage = battery_voltage(b.soc);
  return {b, halted};
}

} // namespace softfish::control
