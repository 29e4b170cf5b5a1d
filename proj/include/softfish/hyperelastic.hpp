#pragma once

// Two-parameter Mooney-Rivlin material for incompressible silicone.
//
//   W = c1 (I1 - 3) + c2 (I2 - 3)
//
// Incompressibility is built into the deformation paths (det C = 1); there is
// no volumetric penalty term.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "softfish/errors.hpp"

namespace softfish::hyperelastic {

struct MaterialParams {
  double c1 = 0.0;  // Pa
  double c2 = 0.0;  // Pa
};

// Ecoflex 30 constants used for the FEM runs. 2(c1 + c2) < 0: unstable at
// small strain.
inline constexpr MaterialParams kEcoflex30{48e3, -152e3};

// Stable pair for bending and vehicle dynamics.
inline constexpr MaterialParams kStableSilicone{60e3, 2e3};

inline constexpr double kSpdTolerance = 1e-9;
inline constexpr double kIncompressibleTolerance = 1e-9;

// Right Cauchy-Green tensor, validated symmetric positive-definite on construction.
class Deformation {
public:
  explicit Deformation(const Eigen::Matrix3d& c) : c_(c) {
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (!c.allFinite()) {
      throw InvalidDeformation("Cauchy-Green tensor has non-finite entries");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidDeformation("Cauchy-Green tensor is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(c, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= kSpdTolerance) {
      throw InvalidDeformation("Cauchy-Green tensor is not positive-definite (min eigenvalue " +
                               std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
    det_c_ = c.determinant();
  }

  const Eigen::Matrix3d& c_tensor() const noexcept { return c_; }
  double det_c() const noexcept { return det_c_; }
  bool incompressible() const noexcept {
    return std::abs(det_c_ - 1.0) <= kIncompressibleTolerance;
  }

  // C = F^T F for a deformation gradient F.
  static Deformation from_gradient(const Eigen::Matrix3d& f) {
    Eigen::Matrix3d c = f.transpose() * f;
    c = 0.5 * (c + c.transpose()).eval();
    return Deformation(c);
  }

  // Incompressible uniaxial stretch along x.
  static Deformation uniaxial(double lambda) {
    if (!(lambda > 0.0)) {
      throw DomainError("stretch must be positive");
    }
    return Deformation(Eigen::Vector3d(lambda * lambda, 1.0 / lambda, 1.0 / lambda).asDiagonal());
  }

  // Simple shear of amount gamma in the x-y plane.
  static Deformation simple_shear(double gamma) {
    Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
    f(0, 1) = gamma;
    return from_gradient(f);
  }

private:
  Eigen::Matrix3d c_;
  double det_c_ = 1.0;
};

struct Invariants {
  double i1 = 3.0;
  double i2 = 3.0;
};

class UniaxialStretch {
public:
  explicit UniaxialStretch(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw DomainError("uniaxial stretch must be a positive finite ratio");
    }
  }
  double lambda() const noexcept { return lambda_; }

private:
  double lambda_;
};

inline Invariants invariants_from_cauchy_green(const Deformation& d) {
  const Eigen::Matrix3d& c = d.c_tensor();
  const double tr = c.trace();
  const double tr_sq = (c * c).trace();
  return {tr, 0.5 * (tr * tr - tr_sq)};
}

inline double strain_energy(const MaterialParams& p, const Invariants& inv) {
  return p.c1 * (inv.i1 - 3.0) + p.c2 * (inv.i2 - 3.0);
}

inline double small_strain_shear_modulus(const MaterialParams& p) {
  return 2.0 * (p.c1 + p.c2);
}

inline bool stable_at_small_strain(const MaterialParams& p) {
  return small_strain_shear_modulus(p) > 0.0;
}

// Incompressible uniaxial path: I1 = l^2 + 2/l, I2 = 2l + 1/l^2.
inline Invariants uniaxial_invariants(double lambda) {
  return {lambda * lambda + 2.0 / lambda, 2.0 * lambda + 1.0 / (lambda * lambda)};
}

inline double uniaxial_energy(const MaterialParams& p, double lambda) {
  return strain_energy(p, uniaxial_invariants(lambda));
}

// dW/dlambda along the uniaxial path.
inline double uniaxial_energy_slope(const MaterialParams& p, double lambda) {
  const double l2 = lambda * lambda;
  return p.c1 * (2.0 * lambda - 2.0 / l2) + p.c2 * (2.0 - 2.0 / (l2 * lambda));
}

// dW/dlambda at lambda = 1 + strain, without cancellation for small strain.
inline double uniaxial_energy_slope_at_strain(const MaterialParams& p, double strain) {
  const double l = 1.0 + strain;
  const double cube_minus_one = strain * (3.0 + strain * (3.0 + strain));
  return 2.0 * cube_minus_one * (p.c1 + p.c2 / l) / (l * l);
}

// d2W/dlambda2 along the uniaxial path.
inline double uniaxial_energy_curvature(const MaterialParams& p, double lambda) {
  const double l3 = lambda * lambda * lambda;
  return p.c1 * (2.0 + 4.0 / l3) + p.c2 * (6.0 / (l3 * lambda));
}

// True (Cauchy) stress under incompressible uniaxial tension: sigma = lambda dW/dlambda.
inline double uniaxial_cauchy_stress(const MaterialParams& p, const UniaxialStretch& s) {
  const double l = s.lambda();
  return 2.0 * (l * l - 1.0 / l) * (p.c1 + p.c2 / l);
}

} // namespace softfish::hyperelastic
