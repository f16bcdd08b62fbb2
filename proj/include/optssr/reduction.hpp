#pragma once

#include "optssr/tensor.hpp"

namespace optssr {

/// How the mobilized strength follows the reduction factor. `Associated`
/// divides both c' and tan(phi') by the factor directly; the Davis variants
/// additionally fold the non-associated flow rule (psi' < phi') into an
/// inflated factor so that the reduced problem stays associated.
enum class ReductionScheme { Associated, DavisA, DavisB, DavisC };

/// Drained strength parameters. Angles in radians.
struct Strength {
  double cohesion = 0.0;   // c' (kPa)
  double friction = 0.0;   // phi'
  double dilatancy = 0.0;  // psi', must satisfy 0 <= psi' <= phi'

  void validate() const;
};

/// Mobilized (factored) parameters entering the yield condition.
struct ReducedStrength {
  double cohesion = 0.0;
  double tan_friction = 0.0;
};

/// Strength multiplier q(lambda) for the given scheme. Strictly increasing
/// and continuous in lambda > 0; all schemes agree at lambda = 1.
double reduction_factor(ReductionScheme scheme, const Strength& s, double lambda);

/// Inverse of reduction_factor in lambda, solved to 1e-12 relative accuracy.
/// Throws BracketError when `target` lies outside the attainable range and
/// DegenerateReduction when the scheme is not strictly monotone there.
double invert_reduction(ReductionScheme scheme, const Strength& s, double target);

/// c and tan(phi) divided by the multiplier q.
ReducedStrength reduce_strength(double q, const Strength& s);

/// Mohr-Coulomb yield value at factor q, tension-positive principal stresses:
///   (s1 - s3) sqrt(q^2 + tan^2 phi') + (s1 + s3) tan phi' - 2 c'
/// Admissible iff <= 0. Scale-equivalent to the classical form in the
/// mobilized parameters c/q, atan(tan phi'/q).
double mohr_coulomb_value(double q, const Strength& s, double sigma1, double sigma3);
double mohr_coulomb_value(double q, const Strength& s, const Spectral3& stress);

}  // namespace optssr
