#pragma once

// Reduced-order dual-cavity tail actuator.
//
// One uniform curvature per actuator. Plane sections stay plane, the
// constraining layer at y = 0 is inextensible, and every fiber at offset y
// stretches by lambda = 1 + kappa * y on the incompressible uniaxial path.
// The bending energy per unit length is the Mooney-Rivlin energy integrated
// over the rectangular cross-section; cavity pressure enters as a moment.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "softfish/errors.hpp"
#include "softfish/hyperelastic.hpp"
#include "softfish/numerics.hpp"

namespace softfish::actuator {

using hyperelastic::MaterialParams;

// Per-cavity pressure limits (Pa) at which the FEM still converged.
inline constexpr double kMaxPressure = 44500.0;
inline constexpr double kMinPressure = -8000.0;

inline constexpr double kAnchorDeflection = 0.040;  // m, at (44500, -8000) Pa

inline constexpr double kBracket = 20.0;  // 1/m
inline constexpr double kResidualTolerance = 1e-10;
inline constexpr int kMaxIterations = 100;

struct ActuatorGeometry {
  double length = 0.15;          // m
  double half_thickness = 0.015; // m
  double width = 0.04;           // m
  double cavity_area = 3e-4;     // m^2
  double moment_arm = 7.5e-3;    // m
  int n_segments = 1;
  // Fit once against the 40 mm anchor with kStableSilicone and the default
  // geometry (see calibrate_gain).
  double calibration_gain = 1.0358368434027687;

  void validate() const {
    if (!(length > 0.0 && half_thickness > 0.0 && width > 0.0 && cavity_area > 0.0 &&
          moment_arm > 0.0)) {
      throw DomainError("actuator dimensions must be positive");
    }
    if (n_segments < 1) {
      throw DomainError("actuator needs at least one segment");
    }
    if (!(calibration_gain > 0.0)) {
      throw DomainError("calibration gain must be positive");
    }
  }
};

struct ActuatorState {
  double p_left = 0.0;   // Pa
  double p_right = 0.0;  // Pa
  double curvature = 0.0;      // 1/m, positive bends toward the right cavity
  double tip_deflection = 0.0; // m
};

struct FlexPair {
  double r_a = 10e3;
  double r_b = 10e3;
  double kappa_max = 3.6454935319703194;  // 1/m, equilibrium curvature at full load
};

inline bool within_envelope(double p) { return p >= kMinPressure && p <= kMaxPressure; }

// Fishtail pressure program: 16 s period, strong branch 44.5 kPa, weak branch 8 kPa.
inline std::pair<double, double> pressure_waveform(double t) {
  const double u = std::sin(0.125 * std::numbers::pi * t);
  constexpr double strong = kMaxPressure;
  constexpr double weak = -kMinPressure;
  if (u >= 0.0) {
    return {strong * u, -weak * u};
  }
  return {weak * u, -strong * u};
}

namespace detail {
inline const numerics::GaussLegendre<48>& fiber_rule() {
  static const numerics::GaussLegendre<48> rule;
  return rule;
}

inline void check_curvature(const ActuatorGeometry& g, double kappa) {
  if (!std::isfinite(kappa) || std::abs(kappa) * g.half_thickness >= 1.0) {
    throw DomainError("curvature collapses the outer fiber");
  }
}
} // namespace detail

// U(kappa): J/m.
inline double bending_energy_per_length(const ActuatorGeometry& g, const MaterialParams& p,
                                        double kappa) {
  detail::check_curvature(g, kappa);
  const double integral = detail::fiber_rule().integrate_symmetric(
      [&](double y) { return hyperelastic::uniaxial_energy(p, 1.0 + kappa * y); },
      g.half_thickness);
  return g.width * integral;
}

// dU/dkappa: internal bending moment, N.
inline double bending_moment(const ActuatorGeometry& g, const MaterialParams& p, double kappa) {
  detail::check_curvature(g, kappa);
  const double integral = detail::fiber_rule().integrate_symmetric(
      [&](double y) { return hyperelastic::uniaxial_energy_slope_at_strain(p, kappa * y) * y; },
      g.half_thickness);
  return g.width * integral;
}

// d2U/dkappa2.
inline double bending_stiffness(const ActuatorGeometry& g, const MaterialParams& p,
                                double kappa) {
  detail::check_curvature(g, kappa);
  const double integral = detail::fiber_rule().integrate_symmetric(
      [&](double y) {
        return hyperelastic::uniaxial_energy_curvature(p, 1.0 + kappa * y) * y * y;
      },
      g.half_thickness);
  return g.width * integral;
}

inline double pressure_moment(const ActuatorGeometry& g, double p_left, double p_right) {
  return g.calibration_gain * (p_left - p_right) * g.cavity_area * g.moment_arm;
}

// Equilibrium curvature for the cavity pressures in `state`. `guess` warm-starts
// Newton; the bracket is always [-20, 20] 1/m.
inline double solve_curvature(const ActuatorGeometry& g, const MaterialParams& p,
                              const ActuatorState& state, double guess = 0.0) {
  if (!within_envelope(state.p_left) || !within_envelope(state.p_right)) {
    throw DomainError("cavity pressure outside the operating envelope");
  }
  const double load = pressure_moment(g, state.p_left, state.p_right);
  if (load == 0.0) {
    return 0.0;
  }
  auto residual = [&](double kappa) {
    return std::pair{bending_moment(g, p, kappa) - load, bending_stiffness(g, p, kappa)};
  };
  return numerics::safeguarded_newton(residual, -kBracket, kBracket, guess,
                                      kResidualTolerance * std::abs(load), kMaxIterations)
      .x;
}

// Lateral tip offset of a constant-curvature arc.
inline double tip_deflection(double kappa, double length) {
  if (!(length > 0.0)) {
    throw DomainError("actuator length must be positive");
  }
  if (std::abs(kappa * length) < 1e-6) {
    return kappa * length * length / 2.0;
  }
  const double s = std::sin(0.5 * kappa * length);
  return 2.0 * s * s / kappa;
}

inline ActuatorState solve_state(const ActuatorGeometry& g, const MaterialParams& p,
                                 double p_left, double p_right, double guess = 0.0) {
  ActuatorState st{p_left, p_right, 0.0, 0.0};
  st.curvature = solve_curvature(g, p, st, guess);
  st.tip_deflection = tip_deflection(st.curvature, g.length);
  return st;
}

inline std::pair<double, double> flex_resistances(const FlexPair& f, double kappa) {
  const double a = std::clamp(kappa / f.kappa_max, 0.0, 1.0);
  const double b = std::clamp(-kappa / f.kappa_max, 0.0, 1.0);
  return {10e3 + 100e3 * a, 10e3 + 100e3 * b};
}

// Inverse of the linear flex law, valid for |kappa| <= kappa_max.
inline double curvature_from_flex(const FlexPair& f, double r_a, double r_b) {
  return f.kappa_max * ((r_a - 10e3) - (r_b - 10e3)) / 100e3;
}

// Curvature that puts the tip at `deflection` (0 < deflection < max arc offset).
inline double curvature_for_deflection(double deflection, double length) {
  auto f = [&](double kappa) {
    const double kl = kappa * length;
    const double value = tip_deflection(kappa, length) - deflection;
    const double slope = std::abs(kl) < 1e-6
                             ? length * length / 2.0
                             : length * std::sin(kl) / kappa - (1.0 - std::cos(kl)) / (kappa * kappa);
    return std::pair{value, slope};
  };
  return numerics::safeguarded_newton(f, 0.0, kBracket, 0.5 * kBracket, 1e-15, kMaxIterations).x;
}

struct Calibration {
  double gain;
  double target_curvature;  // 1/m
};

// Gain such that (44500, -8000) Pa deflects the tip by 40 mm. Throws when the
// material bends away from the pressurised side (negative gain).
inline Calibration calibrate_gain(ActuatorGeometry g, const MaterialParams& p) {
  g.calibration_gain = 1.0;
  const double kappa = curvature_for_deflection(kAnchorDeflection, g.length);
  const double raw = pressure_moment(g, kMaxPressure, kMinPressure);
  const double gain = bending_moment(g, p, kappa) / raw;
  if (!(gain > 0.0)) {
    throw DomainError("material has no positive-curvature response; cannot calibrate");
  }
  return {gain, kappa};
}

} // namespace softfish::actuator
