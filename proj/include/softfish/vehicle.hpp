#pragma once

// Lumped rigid-body model of the fish: surge, heave, pitch and yaw with
// quadratic drag, roll held at zero by the pelvic/dorsal fins, and neutral
// buoyancy. None of the coefficients are measured; they live in config.
//
// Conventions: x forward, y to the left, depth positive down. Pitch is
// positive nose-up, yaw positive toward +y (a left turn). Heave w is the
// body-frame velocity along the belly direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <sstream>
#include <string>

#include "softfish/errors.hpp"
#include "softfish/sensors.hpp"

namespace softfish::vehicle {

inline constexpr double kGravity = 9.80665;       // m/s^2
inline constexpr double kSurfaceDepth = -0.05;    // m, highest the body can ride
inline constexpr double kMaxMassTravel = 0.006;   // m, 600 steps of lead screw

struct HydroParams {
  double mass = 1.2;               // kg
  double pitch_inertia = 0.016;    // kg m^2
  double yaw_inertia = 0.016;      // kg m^2
  double k_thrust = 0.5;           // N s^2/m^2 on tail-tip lateral speed
  double c_drag_surge = 0.4;       // N s^2/m^2, 0.5 rho Cd A with Cd 0.1, A 0.008
  double c_drag_heave = 15.0;      // N s^2/m^2, broadside
  double k_fin_lift = 0.5;         // N/rad per (m/s)^2, both fins
  double fin_arm = 0.08;           // m, fin lift ahead of the centre of gravity
  double k_fin_yaw = 0.05;         // N m/rad per (m/s)^2
  double k_restore_pitch = 0.0589; // N m/rad, mass * g * metacentric height
  double cog_moment_per_m = 1.962; // N m/m, shifting mass * g
  double damping_q = 0.043;        // N m s
  double damping_r = 0.05;         // N m s
  double k_tail_yaw = 0.01;        // N m per 1/m of curvature bias
  double tail_bias_window = 1.0;   // s

  void validate() const {
    const double v[] = {mass, pitch_inertia, yaw_inertia, k_thrust, c_drag_surge,
                        c_drag_heave, k_fin_lift, fin_arm, k_fin_yaw, k_restore_pitch,
                        cog_moment_per_m, damping_q, damping_r, k_tail_yaw, tail_bias_window};
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("hydrodynamic parameters must be positive and finite");
      }
    }
  }
};

struct VehicleState {
  double x = 0.0, y = 0.0, depth = 0.0;  // m
  double yaw = 0.0, pitch = 0.0;         // rad
  double u = 0.0;   // surge, m/s
  double w = 0.0;   // heave, m/s
  double r = 0.0;   // yaw rate, rad/s
  double q = 0.0;   // pitch rate, rad/s
  double u_dot = 0.0, w_dot = 0.0;  // body accelerations over the last step

  double kinetic_energy(const HydroParams& hp) const {
    return 0.5 * hp.mass * (u * u + w * w) + 0.5 * hp.pitch_inertia * q * q +
           0.5 * hp.yaw_inertia * r * r;
  }
};

struct Forces {
  double thrust = 0.0;      // N along the body axis
  double lift = 0.0;        // N, positive upward
  double pitch_moment = 0.0; // N m, positive nose-up
  double yaw_moment = 0.0;   // N m, positive left
};

// Mean thrust from the square of the tail-tip lateral speed.
inline double tail_thrust(double kappa_rate, double geom_length, const HydroParams& hp) {
  const double tip_speed = kappa_rate * geom_length * geom_length / 2.0;
  return hp.k_thrust * tip_speed * tip_speed;
}

struct FinLoads {
  double lift;          // N, up
  double pitch_moment;  // N m, nose-up
  double yaw_moment;    // N m, left
};

// Common-mode fin angle gives lift and pitch; the differential gives yaw.
// Negative common mode (trailing edges up) lifts the nose.
inline FinLoads fin_forces(double u, double fin_left_deg, double fin_right_deg,
                           const HydroParams& hp) {
  if (std::abs(fin_left_deg) > 45.0 || std::abs(fin_right_deg) > 45.0) {
    throw DomainError("fin angle outside +/-45 deg");
  }
  constexpr double rad = std::numbers::pi / 180.0;
  const double c = 0.5 * (fin_left_deg + fin_right_deg) * rad;
  const double d = (fin_left_deg - fin_right_deg) * rad;
  const double q = u * u;
  return {-hp.k_fin_lift * q * c, -hp.k_fin_lift * hp.fin_arm * q * c, hp.k_fin_yaw * q * d};
}

// Nose-up moment from the movable mass; mass_x < 0 moves it toward the tail.
inline double cog_pitch_moment(double mass_x, const HydroParams& hp) {
  if (std::abs(mass_x) > kMaxMassTravel * (1.0 + 1e-12)) {
    throw DomainError("mass position beyond lead-screw travel");
  }
  return -hp.cog_moment_per_m * mass_x;
}

inline double cog_equilibrium_pitch(double mass_x, const HydroParams& hp) {
  return cog_pitch_moment(mass_x, hp) / hp.k_restore_pitch;
}

// Mid-range of the tail curvature over a trailing window: the turning bias
// left by uneven half-strokes. Zero until the window has filled once.
class CurvatureBias {
public:
  explicit CurvatureBias(std::size_t window_ticks = 1000) : window_(window_ticks) {}

  void push(double kappa) {
    const std::size_t idx = count_++;
    while (!max_.empty() && max_.back().value <= kappa) max_.pop_back();
    max_.push_back({idx, kappa});
    while (!min_.empty() && min_.back().value >= kappa) min_.pop_back();
    min_.push_back({idx, kappa});
    while (max_.front().index + window_ <= idx) max_.pop_front();
    while (min_.front().index + window_ <= idx) min_.pop_front();
  }

  double bias() const {
    if (count_ < window_) {
      return 0.0;
    }
    return 0.5 * (max_.front().value + min_.front().value);
  }

  void reset() {
    max_.clear();
    min_.clear();
    count_ = 0;
  }

private:
  struct Entry {
    std::size_t index;
    double value;
  };
  std::size_t window_;
  std::size_t count_ = 0;
  std::deque<Entry> max_;
  std::deque<Entry> min_;
};

inline double tail_yaw_moment(double curvature_bias, const HydroParams& hp) {
  // A bias toward negative curvature (stronger strokes to the right) turns left.
  return -hp.k_tail_yaw * curvature_bias;
}

inline std::string describe(const VehicleState& v) {
  std::ostringstream os;
  os << "x=" << v.x << " y=" << v.y << " depth=" << v.depth << " yaw=" << v.yaw
     << " pitch=" << v.pitch << " u=" << v.u << " w=" << v.w << " r=" << v.r << " q=" << v.q;
  return os.str();
}

// Semi-implicit Euler. Drag and damping are treated implicitly so a coasting
// body always loses speed, then the pose is advanced with the new velocities.
inline VehicleState step_dynamics(const VehicleState& vs, const Forces& f, const HydroParams& hp,
                                  double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("dynamics step needs dt > 0");
  }
  VehicleState n = vs;
  n.u = (vs.u + dt * f.thrust / hp.mass) / (1.0 + dt * hp.c_drag_surge * std::abs(vs.u) / hp.mass);
  n.w = (vs.w - dt * f.lift / hp.mass) / (1.0 + dt * hp.c_drag_heave * std::abs(vs.w) / hp.mass);
  n.q = (vs.q + dt * (f.pitch_moment - hp.k_restore_pitch * vs.pitch) / hp.pitch_inertia) /
        (1.0 + dt * hp.damping_q / hp.pitch_inertia);
  n.r = (vs.r + dt * f.yaw_moment / hp.yaw_inertia) / (1.0 + dt * hp.damping_r / hp.yaw_inertia);
  n.u_dot = (n.u - vs.u) / dt;
  n.w_dot = (n.w - vs.w) / dt;

  n.pitch = vs.pitch + n.q * dt;
  n.yaw = vs.yaw + n.r * dt;
  const double ct = std::cos(n.pitch);
  const double st = std::sin(n.pitch);
  const double horizontal = n.u * ct + n.w * st;
  n.x = vs.x + horizontal * std::cos(n.yaw) * dt;
  n.y = vs.y + horizontal * std::sin(n.yaw) * dt;
  n.depth = vs.depth + (n.w * ct - n.u * st) * dt;
  if (n.depth < kSurfaceDepth) {
    n.depth = kSurfaceDepth;
    n.w = std::max(n.w, 0.0);
  }

  const double check[] = {n.x, n.y, n.depth, n.yaw, n.pitch, n.u, n.w, n.r, n.q};
  for (double v : check) {
    if (!std::isfinite(v)) {
      throw SimulationFault("non-finite vehicle state", describe(n));
    }
  }
  return n;
}

// Synthesised IMU reading. Sensor axes: x forward, z up through the back,
// so a level fish at rest reads +1 g on z. gy carries the nose-up pitch rate
// and gz the left yaw rate.
inline sensors::ImuSample emit_imu(const VehicleState& vs, const sensors::ImuConfig& cfg,
                                   const std::array<double, 6>& noise = {}) {
  constexpr double deg = 180.0 / std::numbers::pi;
  const double fx = std::sin(vs.pitch) + vs.u_dot / kGravity;
  const double fz = std::cos(vs.pitch) - vs.w_dot / kGravity;
  sensors::ImuSample s;
  s.ax = sensors::g_to_accel_raw(cfg, fx + noise[0]);
  s.ay = sensors::g_to_accel_raw(cfg, noise[1]);
  s.az = sensors::g_to_accel_raw(cfg, fz + noise[2]);
  s.gx = sensors::dps_to_gyro_raw(cfg, noise[3]);
  s.gy = sensors::dps_to_gyro_raw(cfg, vs.q * deg + noise[4]);
  s.gz = sensors::dps_to_gyro_raw(cfg, vs.r * deg + noise[5]);
  return s;
}

} // namespace softfish::vehicle
