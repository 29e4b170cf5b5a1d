#pragma once

// MPU-6050 style IMU conversions, attitude estimation, ACS712 current
// sensing through a 10-bit ADC, and the conductive water probe.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

#include "softfish/errors.hpp"

namespace softfish::sensors {

inline constexpr double kFullScaleCounts = 32768.0;

class ImuConfig {
public:
  ImuConfig() = default;
  ImuConfig(int accel_scale_g, int gyro_scale_dps)
      : accel_scale_(accel_scale_g), gyro_scale_(gyro_scale_dps) {
    if (accel_scale_g != 2 && accel_scale_g != 4 && accel_scale_g != 8 && accel_scale_g != 16) {
      throw DomainError("accelerometer range must be 2, 4, 8 or 16 g");
    }
    if (gyro_scale_dps != 250 && gyro_scale_dps != 500 && gyro_scale_dps != 1000 &&
        gyro_scale_dps != 2000) {
      throw DomainError("gyro range must be 250, 500, 1000 or 2000 deg/s");
    }
  }

  int accel_scale() const noexcept { return accel_scale_; }
  int gyro_scale() const noexcept { return gyro_scale_; }

  // One least-significant bit in physical units.
  double accel_lsb() const noexcept { return accel_scale_ / kFullScaleCounts; }
  double gyro_lsb() const noexcept { return gyro_scale_ / kFullScaleCounts; }

private:
  int accel_scale_ = 2;
  int gyro_scale_ = 250;
};

struct ImuSample {
  std::int16_t ax = 0, ay = 0, az = 0;
  std::int16_t gx = 0, gy = 0, gz = 0;
};

struct Attitude {
  double roll = 0.0;   // deg
  double pitch = 0.0;  // deg
};

inline double accel_raw_to_g(const ImuConfig& cfg, int d) {
  return cfg.accel_scale() * static_cast<double>(d) / kFullScaleCounts;
}

inline double gyro_raw_to_dps(const ImuConfig& cfg, int d) {
  return cfg.gyro_scale() * static_cast<double>(d) / kFullScaleCounts;
}

namespace detail {
inline std::int16_t to_counts(double value, double scale) {
  const double counts = std::round(value / scale * kFullScaleCounts);
  if (std::isnan(counts)) {
    return 0;
  }
  return static_cast<std::int16_t>(std::clamp(counts, -32768.0, 32767.0));
}
} // namespace detail

inline std::int16_t g_to_accel_raw(const ImuConfig& cfg, double a) {
  return detail::to_counts(a, cfg.accel_scale());
}

inline std::int16_t dps_to_gyro_raw(const ImuConfig& cfg, double w) {
  return detail::to_counts(w, cfg.gyro_scale());
}

// Roll is the angle between the gravity vector and the x-z plane, negative
// for y > 0; pitch is the angle to the y-z plane, negative for x < 0.
inline Attitude attitude_from_accel(const Eigen::Vector3d& a) {
  const double norm = a.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("attitude undefined for a zero acceleration vector");
  }
  const double x = a.x(), y = a.y(), z = a.z();
  constexpr double deg = 180.0 / std::numbers::pi;
  double roll = std::acos(std::min(1.0, std::sqrt(x * x + z * z) / norm)) * deg;
  double pitch = std::acos(std::min(1.0, std::sqrt(y * y + z * z) / norm)) * deg;
  if (y > 0.0) {
    roll = -roll;
  }
  if (x < 0.0) {
    pitch = -pitch;
  }
  return {roll, pitch};
}

inline Attitude attitude_from_sample(const ImuConfig& cfg, const ImuSample& s) {
  return attitude_from_accel({accel_raw_to_g(cfg, s.ax), accel_raw_to_g(cfg, s.ay),
                              accel_raw_to_g(cfg, s.az)});
}

inline constexpr double kDefaultComplementaryAlpha = 0.98;

// Per axis: alpha * (previous + rate * dt) + (1 - alpha) * accelerometer angle.
inline Attitude complementary_update(const Attitude& prev, double roll_rate, double pitch_rate,
                                     const Attitude& accel_att, double dt,
                                     double alpha = kDefaultComplementaryAlpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("complementary weight must lie in [0, 1]");
  }
  if (!(dt > 0.0)) {
    throw DomainError("complementary filter needs dt > 0");
  }
  return {alpha * (prev.roll + roll_rate * dt) + (1.0 - alpha) * accel_att.roll,
          alpha * (prev.pitch + pitch_rate * dt) + (1.0 - alpha) * accel_att.pitch};
}

struct KalmanTuning {
  double q_angle = 0.001;
  double q_bias = 0.003;
  double r_measure = 0.03;
};

struct KalmanAxisState {
  double angle = 0.0;  // deg
  double bias = 0.0;   // deg/s
  std::array<std::array<double, 2>, 2> covariance{};
};

// Fresh filter at `angle`. The angle variance default lets a cold start lock
// onto the accelerometer within about a second.
inline KalmanAxisState make_kalman_state(double angle = 0.0, double angle_variance = 1.0,
                                         double bias_variance = 0.0) {
  KalmanAxisState st;
  st.angle = angle;
  st.covariance = {{{angle_variance, 0.0}, {0.0, bias_variance}}};
  return st;
}

// Two-state (angle, gyro bias) filter: predict with the gyro rate, correct
// with the accelerometer angle.
inline KalmanAxisState kalman_update(KalmanAxisState st, double gyro_rate, double accel_angle,
                                     double dt, const KalmanTuning& tune = {}) {
  if (!(dt > 0.0)) {
    throw DomainError("Kalman update needs dt > 0");
  }
  auto& p = st.covariance;

  st.angle += (gyro_rate - st.bias) * dt;
  p[0][0] += dt * (dt * p[1][1] - p[0][1] - p[1][0] + tune.q_angle);
  p[0][1] -= dt * p[1][1];
  p[1][0] -= dt * p[1][1];
  p[1][1] += tune.q_bias * dt;

  const double s = p[0][0] + tune.r_measure;
  const double k0 = p[0][0] / s;
  const double k1 = p[1][0] / s;
  const double innovation = accel_angle - st.angle;
  st.angle += k0 * innovation;
  st.bias += k1 * innovation;

  const double p00 = p[0][0];
  const double p01 = p[0][1];
  p[0][0] -= k0 * p00;
  p[0][1] -= k0 * p01;
  p[1][0] -= k1 * p00;
  p[1][1] -= k1 * p01;
  const double off = 0.5 * (p[0][1] + p[1][0]);
  p[0][1] = off;
  p[1][0] = off;
  return st;
}

enum class CurrentMode { PaperEq, Datasheet };

struct CurrentSense {
  double i_p = 0.0;
  double v_out = 0.0;
  int digital = 0;
  CurrentMode mode = CurrentMode::PaperEq;
};

inline constexpr double kCurrentRange = 5.0;  // A

// ADC reading for a sensed current. PaperEq uses the published linear fit
// 40.92 I + 511.5 directly; Datasheet goes through 185 mV/A around 2.5 V.
// Both round half away from zero and clamp to 10 bits.
inline int current_digital(CurrentMode mode, double i_p) {
  double counts = 0.0;
  if (mode == CurrentMode::PaperEq) {
    counts = std::round(40.92 * i_p + 511.5);
  } else {
    const double v = 0.185 * i_p + 2.5;
    counts = std::round(v / 5.0 * 1023.0);
  }
  return static_cast<int>(std::clamp(counts, 0.0, 1023.0));
}

inline CurrentSense sense_current(CurrentMode mode, double i_p) {
  const double v = mode == CurrentMode::PaperEq ? 0.19 * i_p + 2.55 : 0.185 * i_p + 2.5;
  return {i_p, v, current_digital(mode, i_p), mode};
}

enum class Logic { Low, High };

// Output is pulled low only while the probe is strictly below the surface.
inline Logic water_sensor(double depth_at_probe) {
  return depth_at_probe > 0.0 ? Logic::Low : Logic::High;
}

} // namespace softfish::sensors
