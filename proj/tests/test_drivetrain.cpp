#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "softfish/drivetrain.hpp"

namespace dt = softfish::drivetrain;

TEST(HBridge, Examples) {
  EXPECT_DOUBLE_EQ(dt::hbridge_output(12.0, {true, false, 1.0}), 12.0);
  EXPECT_DOUBLE_EQ(dt::hbridge_output(12.0, {false, true, 0.5}), -6.0);
  EXPECT_DOUBLE_EQ(dt::hbridge_output(12.0, {true, true, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(dt::hbridge_output(12.0, {false, false, 0.7}), 0.0);
}

TEST(HBridge, OddUnderPinSwap) {
  for (double d = 0.0; d <= 1.0; d += 0.05) {
    for (bool a : {false, true}) {
      for (bool b : {false, true}) {
        EXPECT_EQ(dt::hbridge_output(11.1, {a, b, d}), -dt::hbridge_output(11.1, {b, a, d}));
      }
    }
  }
}

TEST(HBridge, RejectsNegativeSupply) {
  EXPECT_THROW(dt::hbridge_output(-1.0, {true, false, 1.0}), softfish::DomainError);
}

TEST(Pump, FlowExamples) {
  EXPECT_DOUBLE_EQ(dt::pump_flow(12.0).value, 2.0);
  EXPECT_DOUBLE_EQ(dt::pump_flow(0.0).value, 0.0);
  EXPECT_DOUBLE_EQ(dt::pump_flow(-6.0).value, -1.0);
  EXPECT_FALSE(dt::pump_flow(12.0).clamped);
}

TEST(Pump, OverVoltageClampsWithFlag) {
  const auto f = dt::pump_flow(15.0);
  EXPECT_TRUE(f.clamped);
  EXPECT_DOUBLE_EQ(f.value, 2.0);
  EXPECT_DOUBLE_EQ(dt::pump_flow(-30.0).value, -2.0);
}

TEST(Pump, CurrentDraw) {
  EXPECT_DOUBLE_EQ(dt::pump_current(0.0), 0.0);
  EXPECT_DOUBLE_EQ(dt::pump_current(1.0), 0.8);
  EXPECT_DOUBLE_EQ(dt::pump_current(0.5), 0.4);
}

namespace {
dt::HydraulicOutput settle(double v, int ticks = 2000) {
  dt::PumpState p;
  dt::HydraulicOutput out{p, 0.0, 0.0};
  for (int i = 0; i < ticks; ++i) {
    out = dt::hydraulic_update(out.state, v, 0.001);
  }
  return out;
}
} // namespace

TEST(Hydraulics, SteadyStates) {
  const auto pos = settle(12.0);
  EXPECT_NEAR(pos.p_left, 44500.0, 1e-6);
  EXPECT_NEAR(pos.p_right, -8000.0, 1e-6);
  const auto zero = settle(0.0);
  EXPECT_EQ(zero.p_left, 0.0);
  EXPECT_EQ(zero.p_right, 0.0);
  const auto neg = settle(-12.0);
  EXPECT_NEAR(neg.p_left, -8000.0, 1e-6);
  EXPECT_NEAR(neg.p_right, 44500.0, 1e-6);
}

TEST(Hydraulics, FirstOrderLagMatchesExponential) {
  dt::PumpState p;
  for (int i = 0; i < 50; ++i) p = dt::hydraulic_update(p, 12.0, 0.001).state;
  EXPECT_NEAR(p.delta_p_frac, 1.0 - std::exp(-1.0), 1e-12);
  // Step size does not change the trajectory.
  dt::PumpState q;
  for (int i = 0; i < 5; ++i) q = dt::hydraulic_update(q, 12.0, 0.01).state;
  EXPECT_NEAR(q.delta_p_frac, p.delta_p_frac, 1e-12);
}

TEST(Hydraulics, SquareWaveReachesWaveformExtrema) {
  const double tau = dt::kHydraulicTau;
  const int half_ticks = static_cast<int>(std::lround(10.0 * tau / 0.001));  // period 20 tau
  dt::PumpState p;
  for (int cycle = 0; cycle < 4; ++cycle) {
    dt::HydraulicOutput out{p, 0, 0};
    for (int i = 0; i < half_ticks; ++i) out = dt::hydraulic_update(out.state, 12.0, 0.001);
    EXPECT_NEAR(out.p_left, 44500.0, 44500.0 * 2e-4);
    EXPECT_NEAR(out.p_right, -8000.0, 8000.0 * 2e-4);
    for (int i = 0; i < half_ticks; ++i) out = dt::hydraulic_update(out.state, -12.0, 0.001);
    EXPECT_NEAR(out.p_left, -8000.0, 8000.0 * 2e-4);
    EXPECT_NEAR(out.p_right, 44500.0, 44500.0 * 2e-4);
    p = out.state;
  }
}

TEST(Hydraulics, OneHertzSineLosesUnderTenPercent) {
  dt::PumpState p;
  double peak = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const double t = i * 0.001;
    p = dt::hydraulic_update(p, 12.0 * std::sin(2.0 * std::numbers::pi * t), 0.001).state;
    if (t > 3.0) peak = std::max(peak, p.delta_p_frac);
  }
  EXPECT_GT(peak, 0.9);
}

TEST(Hydraulics, RejectsNonPositiveStep) {
  EXPECT_THROW(dt::hydraulic_update({}, 1.0, 0.0), softfish::DomainError);
}

TEST(Stepper, SixHundredStepsTakeThreeSeconds) {
  dt::StepperState s;
  s.target = 600;
  int ticks = 0;
  while (s.position != s.target) {
    s = dt::stepper_tick(s, 0.001);
    ++ticks;
    ASSERT_LT(ticks, 10000);
  }
  EXPECT_EQ(ticks, 3000);
  EXPECT_DOUBLE_EQ(dt::step_angle_deg(s.position), 1080.0);
  EXPECT_DOUBLE_EQ(dt::leadscrew_position(s.position), 0.006);
}

TEST(Stepper, IdleWhenOnTarget) {
  dt::StepperState s;
  s.position = s.target = 42;
  s.phase = 2;
  const auto n = dt::stepper_tick(s, 0.001);
  EXPECT_EQ(n.position, 42);
  EXPECT_EQ(n.phase, 2);
  EXPECT_EQ(n.elapsed_us, 0);
}

TEST(Stepper, NeverOvershootsAndPhaseCycles) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> target(-700, 700);
  dt::StepperState s;
  for (int leg = 0; leg < 20; ++leg) {
    s.target = target(rng);
    int gap = std::abs(s.position - s.target);
    for (int i = 0; i < 4000; ++i) {
      const auto n = dt::stepper_tick(s, 0.001);
      const int ngap = std::abs(n.position - n.target);
      EXPECT_LE(ngap, gap);
      EXPECT_LE(gap - ngap, 1);
      if (n.position != s.position) {
        EXPECT_EQ(n.phase, ((s.phase + (n.position - s.position)) % 4 + 4) % 4);
      }
      EXPECT_EQ(((n.position % 4) + 4) % 4, n.phase);
      gap = ngap;
      s = n;
    }
  }
}

TEST(Leadscrew, Examples) {
  EXPECT_EQ(dt::leadscrew_position(0), 0.0);
  EXPECT_DOUBLE_EQ(dt::leadscrew_position(600), 0.006);
  EXPECT_DOUBLE_EQ(dt::leadscrew_position(-600), -0.006);
}

TEST(Leadscrew, TwoHundredStepsPerSecondIsTwoMillimetresPerSecond) {
  dt::StepperState s;
  s.target = 1000;
  for (int i = 0; i < 1000; ++i) s = dt::stepper_tick(s, 0.001);
  EXPECT_EQ(s.position, 200);
  EXPECT_NEAR(dt::leadscrew_position(s.position) / 1.0, 0.002, 1e-15);
}

TEST(Servo, Examples) {
  EXPECT_DOUBLE_EQ(dt::servo_pulse(45.0).value, 2000.0);
  EXPECT_DOUBLE_EQ(dt::servo_pulse(0.0).value, 1500.0);
  EXPECT_NEAR(dt::servo_pulse(-30.0).value, 1166.67, 0.005);
  EXPECT_DOUBLE_EQ(dt::servo_pulse(-45.0).value, 1000.0);
}

TEST(Servo, AffineSymmetry) {
  for (double a = -45.0; a <= 45.0; a += 0.25) {
    EXPECT_NEAR(dt::servo_pulse(a).value + dt::servo_pulse(-a).value, 3000.0, 1e-9);
  }
}

TEST(Servo, ClampsOutOfRange) {
  const auto p = dt::servo_pulse(60.0);
  EXPECT_TRUE(p.clamped);
  EXPECT_DOUBLE_EQ(p.value, 2000.0);
  EXPECT_FALSE(dt::servo_pulse(30.0).clamped);
  EXPECT_DOUBLE_EQ(dt::command_servo(-90.0).fin_angle, -45.0);
  EXPECT_DOUBLE_EQ(dt::servo_write_angle(-30.0), 15.0);
  EXPECT_DOUBLE_EQ(dt::servo_write_angle(0.0), 45.0);
  EXPECT_DOUBLE_EQ(dt::servo_write_angle(30.0), 75.0);
}
