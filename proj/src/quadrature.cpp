#include "optssr/quadrature.hpp"

#include <cmath>

namespace optssr {

const QuadratureRule& QuadratureRule::triangle7() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    const double rt15 = std::sqrt(15.0);
    const double a1 = (6.0 + rt15) / 21.0, w1 = (155.0 + rt15) / 1200.0;
    const double a2 = (6.0 - rt15) / 21.0, w2 = (155.0 - rt15) / 1200.0;
    int k = 0;
    r.points[k++] = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0};
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> b{a1, a1, a1};
      b[i] = 1.0 - 2.0 * a1;
      r.points[k++] = {b, w1};
    }
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> b{a2, a2, a2};
      b[i] = 1.0 - 2.0 * a2;
      r.points[k++] = {b, w2};
    }
    return r;
  }();
  return rule;
}

}  // namespace optssr
