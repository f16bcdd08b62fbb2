#pragma once

#include "optssr/reduction.hpp"
#include "optssr/tensor.hpp"

namespace optssr {

/// Mobilized Mohr-Coulomb material data consumed by the local dissipation
/// kernel: factored strength (cohesion and the trigonometric functions of the
/// mobilized friction angle) plus the elastic moduli of the regularization
/// term. All stress-like entries in kPa.
struct ConstitutiveParams {
  double cohesion = 0.0;  // c / q
  double sin_phi = 0.0;   // sin of mobilized friction angle
  double cos_phi = 1.0;
  double tan_phi = 0.0;
  double bulk = 0.0;   // K
  double shear = 0.0;  // G
  double lame = 0.0;   // Lambda

  /// Build from base strength, multiplier q and elastic moduli.
  static ConstitutiveParams make(const Strength& s, double q, const Elasticity& el);
};

/// Active branch of the closed-form maximizer: where the optimal stress sits
/// on the Mohr-Coulomb pyramid.
enum class ReturnBranch { Elastic, SmoothPortion, LeftEdge, RightEdge, Apex };

/// Value, stress and generalized tangent of the regularized dissipation at
/// one strain point. `tangent` is the 6x6 Mandel representation of dT/deps.
struct ConstitutiveResult {
  double value = 0.0;
  SymTensor3 stress;
  Tangent6 tangent = Tangent6::Zero();
  ReturnBranch branch = ReturnBranch::Elastic;
};

/// Branch selection from sorted principal strains (descending). The five
/// tests partition strain space; a fall-through (non-finite input) throws
/// ClassificationGap.
ReturnBranch classify(const std::array<double, 3>& eps, const ConstitutiveParams& p);

/// Closed-form evaluation of the unit-regularization dissipation D1 together
/// with its first two derivatives.
ConstitutiveResult evaluate_d1(const SymTensor3& eps, const ConstitutiveParams& p);

/// Scaled family: D_alpha(eps) = D1(alpha eps) / alpha, so the stress is
/// T1(alpha eps) and the tangent picks up a factor alpha.
ConstitutiveResult evaluate_t_alpha(const SymTensor3& eps, double alpha,
                                    const ConstitutiveParams& p);

/// Reference evaluation of D1 by projecting the elastic stress onto the
/// admissible cone in principal space (cyclic Dykstra over the six half-space
/// constraints). Independent of the closed-form branch logic; used to
/// cross-check it. Throws OracleNoConvergence past 1e5 projections.
double brute_force_d1(const SymTensor3& eps, const ConstitutiveParams& p);

}  // namespace optssr
