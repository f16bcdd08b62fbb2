#pragma once

#include <array>

namespace optssr {

/// Quadrature rule on the reference triangle {L1 + L2 + L3 = 1}. Points in
/// barycentric coordinates, weights normalized to sum to one (reference
/// area factor applied by the caller).
struct QuadratureRule {
  struct Point {
    std::array<double, 3> bary{};
    double weight = 0.0;
  };
  std::array<Point, 7> points{};

  /// Symmetric 7-point rule, exact for polynomials up to degree 5.
  static const QuadratureRule& triangle7();
};

}  // namespace optssr
