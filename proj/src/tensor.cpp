#include "optssr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

struct EigenSystem {
  std::array<double, 3> values{};
  std::array<Eigen::Vector3d, 3> axes{};
};

/// Cyclic Jacobi sweeps; robust for clustered eigenvalues, used when the
/// closed form loses accuracy.
EigenSystem jacobi_eigen(const Eigen::Matrix3d& a) {
  Eigen::Matrix3d b = a;
  Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
  const double norm = a.norm();
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = std::sqrt(b(0, 1) * b(0, 1) + b(0, 2) * b(0, 2) +
                                 b(1, 2) * b(1, 2));
    if (off <= 1e-15 * std::max(norm, 1e-300)) break;
    for (const auto& pq : pairs) {
      const int p = pq[0], q = pq[1];
      if (std::abs(b(p, q)) <= 1e-300) continue;
      const double theta = (b(q, q) - b(p, p)) / (2.0 * b(p, q));
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
      rot(p, p) = c;
      rot(q, q) = c;
      rot(p, q) = s;
      rot(q, p) = -s;
      b = rot.transpose() * b * rot;
      b(p, q) = b(q, p) = 0.0;
      v = v * rot;
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return b(i, i) > b(j, j); });
  EigenSystem out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = b(order[k], order[k]);
    out.axes[k] = v.col(order[k]);
  }
  return out;
}

/// Most stable column of the cross-product matrix of (a - e I); empty when
/// the eigenvalue is (numerically) multiple.
bool eigenvector_for(const Eigen::Matrix3d& a, double e, Eigen::Vector3d& out) {
  const Eigen::Matrix3d m = a - e * Eigen::Matrix3d::Identity();
  const Eigen::Vector3d r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
  const std::array<Eigen::Vector3d, 3> cands = {r0.cross(r1), r0.cross(r2),
                                                r1.cross(r2)};
  double best = 0.0;
  for (const auto& c : cands) {
    const double n = c.norm();
    if (n > best) {
      best = n;
      out = c / n;
    }
  }
  return best > 1e-12;
}

/// Closed-form symmetric 3x3 eigenvalues (trigonometric resolution of the
/// characteristic cubic).
std::array<double, 3> cardano_values(const Eigen::Matrix3d& a) {
  const double q = a.trace() / 3.0;
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double dx = a(0, 0) - q, dy = a(1, 1) - q, dz = a(2, 2) - q;
  const double p2 = dx * dx + dy * dy + dz * dz + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p <= 1e-300) return {q, q, q};
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  double r = b.determinant() / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {e1, q * 3.0 - e1 - e3, e3};
}

}  // namespace

Spectral3 spectral_decompose(const SymTensor3& t) {
  Spectral3 out;
  const double scale =
      std::max({std::abs(t.xx), std::abs(t.yy), std::abs(t.zz), std::abs(t.xy),
                std::abs(t.yz), std::abs(t.xz)});

  auto finish = [&](const EigenSystem& sys, double s) {
    for (int k = 0; k < 3; ++k) {
      out.values[k] = sys.values[k] * s;
      out.axes[k] = sys.axes[k];
      const Eigen::Vector3d& n = sys.axes[k];
      out.projections[k] = {n.x() * n.x(), n.y() * n.y(), n.z() * n.z(),
                            n.x() * n.y(), n.y() * n.z(), n.x() * n.z()};
    }
  };

  if (!std::isfinite(scale)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EigenSystem sys;
    sys.values = {nan, nan, nan};
    sys.axes = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                Eigen::Vector3d::UnitZ()};
    finish(sys, 1.0);
    return out;
  }
  if (scale == 0.0) {
    EigenSystem sys;
    sys.axes = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                Eigen::Vector3d::UnitZ()};
    finish(sys, 1.0);
    return out;
  }

  const Eigen::Matrix3d a = t.matrix() / scale;
  const std::array<double, 3> vals = cardano_values(a);
  const double span = std::max({1.0, std::abs(vals[0]), std::abs(vals[2])});
  const double gap = std::min(vals[0] - vals[1], vals[1] - vals[2]);

  if (gap < 1e-8 * span) {
    finish(jacobi_eigen(a), scale);
    return out;
  }

  EigenSystem sys;
  sys.values = vals;
  Eigen::Vector3d n1, n3;
  if (!eigenvector_for(a, vals[0], n1) || !eigenvector_for(a, vals[2], n3)) {
    finish(jacobi_eigen(a), scale);
    return out;
  }
  n3 -= n3.dot(n1) * n1;
  n3.normalize();
  sys.axes[0] = n1;
  sys.axes[2] = n3;
  sys.axes[1] = n3.cross(n1);
  finish(sys, scale);
  return out;
}

Elasticity::Elasticity(double youngs, double poisson)
    : youngs_(youngs), poisson_(poisson) {
  if (!(youngs > 0.0) || !(poisson > -1.0) || !(poisson < 0.5)) {
    throw ConfigError("elastic moduli out of range: E must be positive and "
                      "-1 < nu < 0.5");
  }
  bulk_ = youngs / (3.0 * (1.0 - 2.0 * poisson));
  shear_ = youngs / (2.0 * (1.0 + poisson));
  lame_ = bulk_ - 2.0 * shear_ / 3.0;
}

SymTensor3 Elasticity::stress(const SymTensor3& strain) const {
  const double lt = lame_ * strain.trace();
  SymTensor3 s = 2.0 * shear_ * strain;
  s.xx += lt;
  s.yy += lt;
  s.zz += lt;
  return s;
}

double Elasticity::compliance_energy(const SymTensor3& stress) const {
  const double tr = stress.trace();
  const SymTensor3 dev = stress.deviator();
  return tr * tr / (18.0 * bulk_) + dev.dot(dev) / (4.0 * shear_);
}

}  // namespace optssr
