#include "optssr/reduction.hpp"

#include <cmath>
#include <limits>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

/// Davis A inflation: constant in lambda, equals
/// sqrt((1+tan^2 phi)(1+tan^2 psi)) - tan phi tan psi.
double davis_a_factor(const Strength& s) {
  return (1.0 - std::sin(s.friction) * std::sin(s.dilatancy)) /
         (std::cos(s.friction) * std::cos(s.dilatancy));
}

/// Davis B at lambda > 0, written to avoid cancellation:
/// [sqrt((l^2+a^2)(l^2+b^2)) - ab] / l = l (l^2+a^2+b^2) / [sqrt(...) + ab].
double davis_b(double lambda, double a, double b) {
  if (lambda <= 0.0) return (b == 0.0) ? a : 0.0;  // right-limit at zero
  const double root = std::sqrt((lambda * lambda + a * a) * (lambda * lambda + b * b));
  return lambda * (lambda * lambda + a * a + b * b) / (root + a * b);
}

double davis_c(double lambda, double a, double b) {
  if (a >= lambda * b) {
    return std::sqrt((lambda * lambda + a * a) * (1.0 + b * b)) - a * b;
  }
  return lambda;
}

}  // namespace

void Strength::validate() const {
  if (!std::isfinite(cohesion) || cohesion < 0.0) {
    throw ConfigError("cohesion must be finite and non-negative");
  }
  if (!std::isfinite(friction) || friction < 0.0 || friction >= M_PI / 2.0) {
    throw ConfigError("friction angle must lie in [0, 90) degrees");
  }
  if (!std::isfinite(dilatancy) || dilatancy < 0.0 || dilatancy > friction) {
    throw ConfigError("dilatancy angle must lie in [0, friction]");
  }
}

double reduction_factor(ReductionScheme scheme, const Strength& s, double lambda) {
  const double a = std::tan(s.friction);
  const double b = std::tan(s.dilatancy);
  switch (scheme) {
    case ReductionScheme::Associated:
      return lambda;
    case ReductionScheme::DavisA:
      return lambda * davis_a_factor(s);
    case ReductionScheme::DavisB:
      return davis_b(lambda, a, b);
    case ReductionScheme::DavisC:
      return davis_c(lambda, a, b);
  }
  throw Error("unknown reduction scheme");
}

double invert_reduction(ReductionScheme scheme, const Strength& s, double target) {
  if (!std::isfinite(target)) throw BracketError("inversion target must be finite");

  // Closed forms where the factor is linear in lambda.
  if (scheme == ReductionScheme::Associated || scheme == ReductionScheme::DavisA) {
    const double beta =
        scheme == ReductionScheme::Associated ? 1.0 : davis_a_factor(s);
    const double lambda = target / beta;
    if (lambda < 0.0) throw BracketError("target below attainable range");
    return lambda;
  }

  const double floor = reduction_factor(scheme, s, 0.0);
  if (target < floor - 1e-12 * std::max(1.0, std::abs(floor))) {
    throw BracketError("target below attainable range");
  }
  if (target <= floor) return 0.0;

  double lo = 0.0, hi = std::max(1.0, target);
  double q_hi = reduction_factor(scheme, s, hi);
  while (q_hi < target) {
    hi *= 2.0;
    if (hi > 1e12) throw BracketError("target above attainable range");
    q_hi = reduction_factor(scheme, s, hi);
  }

  double q_lo = floor;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket exhausted in double precision
    const double q_mid = reduction_factor(scheme, s, mid);
    if (q_mid == q_lo && q_mid == q_hi) {
      throw DegenerateReduction("reduction factor is flat over the bracket");
    }
    if (q_mid < target) {
      lo = mid;
      q_lo = q_mid;
    } else {
      hi = mid;
      q_hi = q_mid;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

ReducedStrength reduce_strength(double q, const Strength& s) {
  if (!(q > 0.0)) throw ConfigError("reduction multiplier must be positive");
  return {s.cohesion / q, std::tan(s.friction) / q};
}

double mohr_coulomb_value(double q, const Strength& s, double sigma1, double sigma3) {
  const double a = std::tan(s.friction);
  return (sigma1 - sigma3) * std::sqrt(q * q + a * a) + (sigma1 + sigma3) * a -
         2.0 * s.cohesion;
}

double mohr_coulomb_value(double q, const Strength& s, const Spectral3& stress) {
  return mohr_coulomb_value(q, s, stress.values[0], stress.values[2]);
}

}  // namespace optssr
