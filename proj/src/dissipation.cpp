#include "optssr/dissipation.hpp"

#include <algorithm>
#include <cmath>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

/// Scalars shared by branch selection and evaluation. Boundary tests reuse
/// the same floating-point quantities on both sides, so the five branches
/// tile strain space without gaps even under roundoff.
struct BranchData {
  double e1 = 0.0, e2 = 0.0, e3 = 0.0, tr = 0.0;
  double g_sl = 0.0, g_sr = 0.0, g_la = 0.0, g_ra = 0.0;  // corner abscissae
  double q_s = 0.0, q_l = 0.0, q_r = 0.0, q_a = 0.0;      // trial excesses
  double S = 0.0, L = 0.0, R = 0.0, A = 0.0;              // curvatures
  double s_left = 0.0, s_right = 0.0;  // smooth-multiplier margins
  double t_la = 0.0, t_ra = 0.0;       // edge-multiplier margins vs apex
};

BranchData branch_data(const std::array<double, 3>& eps, const ConstitutiveParams& p) {
  BranchData d;
  d.e1 = eps[0];
  d.e2 = eps[1];
  d.e3 = eps[2];
  d.tr = d.e1 + d.e2 + d.e3;

  const double s = p.sin_phi, c = p.cohesion;
  const double G = p.shear, La = p.lame, K = p.bulk;
  const double cc = 2.0 * c * p.cos_phi;

  d.g_sl = (d.e1 - d.e2) / (1.0 + s);
  d.g_sr = (d.e2 - d.e3) / (1.0 - s);
  d.g_la = (d.e1 + d.e2 - 2.0 * d.e3) / (3.0 - s);
  d.g_ra = (2.0 * d.e1 - d.e2 - d.e3) / (3.0 + s);

  d.q_s = 2.0 * La * d.tr * s + 2.0 * G * (1.0 + s) * d.e1 - 2.0 * G * (1.0 - s) * d.e3 - cc;
  d.q_l = 2.0 * La * d.tr * s + G * (1.0 + s) * (d.e1 + d.e2) - 2.0 * G * (1.0 - s) * d.e3 - cc;
  d.q_r = 2.0 * La * d.tr * s + 2.0 * G * (1.0 + s) * d.e1 - G * (1.0 - s) * (d.e2 + d.e3) - cc;
  d.q_a = 2.0 * K * d.tr * s - cc;

  d.S = 4.0 * La * s * s + 4.0 * G * (1.0 + s * s);
  d.L = 4.0 * La * s * s + G * (1.0 + s) * (1.0 + s) + 2.0 * G * (1.0 - s) * (1.0 - s);
  d.R = 4.0 * La * s * s + 2.0 * G * (1.0 + s) * (1.0 + s) + G * (1.0 - s) * (1.0 - s);
  d.A = 4.0 * K * s * s;

  const double m_s = d.q_s / d.S;
  d.s_left = m_s - d.g_sl;
  d.s_right = m_s - d.g_sr;
  d.t_la = d.q_l / d.L - d.g_la;
  d.t_ra = d.q_r / d.R - d.g_ra;
  return d;
}

ReturnBranch select_branch(const BranchData& d) {
  if (!std::isfinite(d.e1 + d.e2 + d.e3)) {
    throw ClassificationGap("non-finite principal strains");
  }
  if (d.q_s <= 0.0) return ReturnBranch::Elastic;
  if (d.s_left < 0.0 && d.s_right < 0.0) return ReturnBranch::SmoothPortion;
  if (d.s_left >= 0.0 && d.t_la < 0.0) return ReturnBranch::LeftEdge;
  if (d.s_right >= 0.0 && d.t_ra < 0.0) return ReturnBranch::RightEdge;
  return ReturnBranch::Apex;
}

/// Principal-space result fed into the lab-frame assembly.
struct PrincipalResult {
  double value = 0.0;
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
};

PrincipalResult evaluate_principal(const BranchData& d, ReturnBranch branch,
                                   const ConstitutiveParams& p) {
  const double s = p.sin_phi;
  const double G = p.shear, La = p.lame, K = p.bulk;
  const Eigen::Vector3d ones = Eigen::Vector3d::Ones();
  const Eigen::Vector3d e(d.e1, d.e2, d.e3);

  PrincipalResult r;
  switch (branch) {
    case ReturnBranch::Elastic: {
      r.value = 0.5 * La * d.tr * d.tr + G * e.squaredNorm();
      r.t = La * d.tr * ones + 2.0 * G * e;
      r.m = La * ones * ones.transpose() + 2.0 * G * Eigen::Matrix3d::Identity();
      break;
    }
    case ReturnBranch::SmoothPortion: {
      const Eigen::Vector3d g(2.0 * La * s + 2.0 * G * (1.0 + s), 2.0 * La * s,
                              2.0 * La * s - 2.0 * G * (1.0 - s));
      r.value = 0.5 * La * d.tr * d.tr + G * e.squaredNorm() -
                d.q_s * d.q_s / (2.0 * d.S);
      r.t = La * d.tr * ones + 2.0 * G * e - (d.q_s / d.S) * g;
      r.m = La * ones * ones.transpose() + 2.0 * G * Eigen::Matrix3d::Identity() -
            g * g.transpose() / d.S;
      break;
    }
    case ReturnBranch::LeftEdge: {
      const double pair = d.e1 + d.e2;
      const Eigen::Vector3d g(2.0 * La * s + G * (1.0 + s),
                              2.0 * La * s + G * (1.0 + s),
                              2.0 * La * s - 2.0 * G * (1.0 - s));
      Eigen::Matrix3d hess = La * ones * ones.transpose();
      hess(0, 0) += G;
      hess(0, 1) += G;
      hess(1, 0) += G;
      hess(1, 1) += G;
      hess(2, 2) += 2.0 * G;
      r.value = 0.5 * La * d.tr * d.tr + G * (0.5 * pair * pair + d.e3 * d.e3) -
                d.q_l * d.q_l / (2.0 * d.L);
      r.t = La * d.tr * ones - (d.q_l / d.L) * g;
      r.t[0] += G * pair;
      r.t[1] += G * pair;
      r.t[2] += 2.0 * G * d.e3;
      r.m = hess - g * g.transpose() / d.L;
      break;
    }
    case ReturnBranch::RightEdge: {
      const double pair = d.e2 + d.e3;
      const Eigen::Vector3d g(2.0 * La * s + 2.0 * G * (1.0 + s),
                              2.0 * La * s - G * (1.0 - s),
                              2.0 * La * s - G * (1.0 - s));
      Eigen::Matrix3d hess = La * ones * ones.transpose();
      hess(0, 0) += 2.0 * G;
      hess(1, 1) += G;
      hess(1, 2) += G;
      hess(2, 1) += G;
      hess(2, 2) += G;
      r.value = 0.5 * La * d.tr * d.tr + G * (d.e1 * d.e1 + 0.5 * pair * pair) -
                d.q_r * d.q_r / (2.0 * d.R);
      r.t = La * d.tr * ones - (d.q_r / d.R) * g;
      r.t[0] += 2.0 * G * d.e1;
      r.t[1] += G * pair;
      r.t[2] += G * pair;
      r.m = hess - g * g.transpose() / d.R;
      break;
    }
    case ReturnBranch::Apex: {
      if (d.A > 0.0) {
        // Optimal stress pinned at the cone tip c cot(phi) I.
        r.value = 0.5 * K * d.tr * d.tr - d.q_a * d.q_a / (2.0 * d.A);
        r.t = (p.cohesion * p.cos_phi / s) * ones;
        r.m.setZero();
      } else {
        // Frictionless cylinder with zero cohesion: hydrostatic response.
        r.value = 0.5 * K * d.tr * d.tr;
        r.t = K * d.tr * ones;
        r.m = K * ones * ones.transpose();
      }
      break;
    }
  }
  return r;
}

Mandel6 projection_mandel(const Eigen::Vector3d& n) {
  return to_mandel({n.x() * n.x(), n.y() * n.y(), n.z() * n.z(), n.x() * n.y(),
                    n.y() * n.z(), n.x() * n.z()});
}

Mandel6 shear_mandel(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double r2 = std::sqrt(2.0);
  return to_mandel({r2 * a.x() * b.x(), r2 * a.y() * b.y(), r2 * a.z() * b.z(),
                    (a.x() * b.y() + a.y() * b.x()) / r2,
                    (a.y() * b.z() + a.z() * b.y()) / r2,
                    (a.x() * b.z() + a.z() * b.x()) / r2});
}

}  // namespace

ConstitutiveParams ConstitutiveParams::make(const Strength& s, double q,
                                            const Elasticity& el) {
  if (!(q > 0.0)) throw ConfigError("reduction multiplier must be positive");
  const double a = std::tan(s.friction);
  const double hyp = std::hypot(q, a);
  ConstitutiveParams p;
  p.cohesion = s.cohesion / q;
  p.sin_phi = a / hyp;
  p.cos_phi = q / hyp;
  p.tan_phi = a / q;
  p.bulk = el.bulk();
  p.shear = el.shear();
  p.lame = el.lame();
  return p;
}

ReturnBranch classify(const std::array<double, 3>& eps, const ConstitutiveParams& p) {
  std::array<double, 3> sorted = eps;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  return select_branch(branch_data(sorted, p));
}

ConstitutiveResult evaluate_d1(const SymTensor3& eps, const ConstitutiveParams& p) {
  const Spectral3 sp = spectral_decompose(eps);
  const BranchData d = branch_data(sp.values, p);
  const ReturnBranch branch = select_branch(d);
  const PrincipalResult pr = evaluate_principal(d, branch, p);

  ConstitutiveResult out;
  out.branch = branch;
  out.value = pr.value;
  for (int i = 0; i < 3; ++i) out.stress += pr.t[i] * sp.projections[i];

  const std::array<Mandel6, 3> pm = {projection_mandel(sp.axes[0]),
                                     projection_mandel(sp.axes[1]),
                                     projection_mandel(sp.axes[2])};
  out.tangent.setZero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.tangent += pr.m(i, j) * pm[i] * pm[j].transpose();
    }
  }
  const double scale =
      std::max({std::abs(sp.values[0]), std::abs(sp.values[2]), 1e-300});
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double gap = sp.values[i] - sp.values[j];
      const double theta = (gap > 1e-9 * scale)
                               ? (pr.t[i] - pr.t[j]) / gap
                               : pr.m(i, i) - pr.m(i, j);
      const Mandel6 em = shear_mandel(sp.axes[i], sp.axes[j]);
      out.tangent += theta * em * em.transpose();
    }
  }
  return out;
}

ConstitutiveResult evaluate_t_alpha(const SymTensor3& eps, double alpha,
                                    const ConstitutiveParams& p) {
  if (!(alpha > 0.0)) throw ConfigError("regularization alpha must be positive");
  ConstitutiveResult r = evaluate_d1(alpha * eps, p);
  r.value /= alpha;
  r.tangent *= alpha;
  return r;
}

double brute_force_d1(const SymTensor3& eps, const ConstitutiveParams& p) {
  const Spectral3 sp = spectral_decompose(eps);
  const Eigen::Vector3d e(sp.values[0], sp.values[1], sp.values[2]);
  const Eigen::Vector3d ones = Eigen::Vector3d::Ones();

  const double rt_dev = std::sqrt(2.0 * p.shear);
  const double rt_hyd = std::sqrt(3.0 * p.bulk);
  // Whitening map: in w-coordinates the compliance quadratic is |w|^2 / 2,
  // so the maximizer is the Euclidean projection of the elastic image.
  const auto unwhiten = [&](const Eigen::Vector3d& v) {
    const double mean = v.sum() / 3.0;
    return (rt_dev * (v - mean * ones) + rt_hyd * mean * ones).eval();
  };

  const Eigen::Vector3d g = unwhiten(e);
  const double bound = 2.0 * p.cohesion * p.cos_phi;

  // Six ordered-pair constraints (1+s) p_i - (1-s) p_j <= 2 c cos(phi),
  // mapped to half-spaces in w.
  std::array<Eigen::Vector3d, 6> normals;
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      Eigen::Vector3d row = Eigen::Vector3d::Zero();
      row[i] = 1.0 + p.sin_phi;
      row[j] = -(1.0 - p.sin_phi);
      normals[k++] = unwhiten(row);  // the map is symmetric
    }
  }

  Eigen::Vector3d w = g;
  std::array<Eigen::Vector3d, 6> corr;
  corr.fill(Eigen::Vector3d::Zero());

  const double tol = 1e-12 * (1.0 + g.norm());
  long projections = 0;
  for (;;) {
    double moved = 0.0;
    for (int c = 0; c < 6; ++c) {
      const Eigen::Vector3d y = w + corr[c];
      const double viol = normals[c].dot(y) - bound;
      Eigen::Vector3d next = y;
      if (viol > 0.0) next -= (viol / normals[c].squaredNorm()) * normals[c];
      corr[c] = y - next;
      moved += (next - w).norm();
      w = next;
      if (++projections > 100000) {
        throw OracleNoConvergence("projection budget exhausted");
      }
    }
    if (moved <= tol) break;
  }
  return w.dot(g) - 0.5 * w.squaredNorm();
}

}  // namespace optssr
