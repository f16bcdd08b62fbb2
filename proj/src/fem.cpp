#include "optssr/fem.hpp"

#include <algorithm>
#include <cmath>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

constexpr double kRoot2 = 1.4142135623730951;

/// P2 shape values and reference gradients at the quadrature points.
struct ReferenceBasis {
  std::array<std::array<double, 6>, 7> value{};
  std::array<std::array<Eigen::Vector2d, 6>, 7> grad{};
};

const ReferenceBasis& reference_basis() {
  static const ReferenceBasis basis = [] {
    ReferenceBasis b;
    const auto& rule = QuadratureRule::triangle7();
    const Eigen::Vector2d dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int q = 0; q < 7; ++q) {
      const auto& l = rule.points[q].bary;
      for (int i = 0; i < 3; ++i) {
        b.value[q][i] = l[i] * (2.0 * l[i] - 1.0);
        b.grad[q][i] = (4.0 * l[i] - 1.0) * dl[i];
      }
      const int pair[3][2] = {{0, 1}, {1, 2}, {2, 0}};
      for (int k = 0; k < 3; ++k) {
        const int i = pair[k][0], j = pair[k][1];
        b.value[q][3 + k] = 4.0 * l[i] * l[j];
        b.grad[q][3 + k] = 4.0 * (l[i] * dl[j] + l[j] * dl[i]);
      }
    }
    return b;
  }();
  return basis;
}

}  // namespace

KinematicSolver::KinematicSolver(const TriMesh& mesh,
                                 const std::vector<Material>& materials,
                                 const WaterTable* water)
    : mesh_(&mesh), materials_(&materials) {
  mesh.validate();
  elem_load_ = body_load(mesh, materials, water);

  elems_.resize(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    ElementGeom& g = elems_[e];
    g.nodes = el;
    g.material = mesh.material[e];
    const Vec2 p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
    Eigen::Matrix2d jac;
    jac << p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y;
    g.det_j = jac.determinant();
    g.inv_j = jac.inverse();
  }

  // Dirichlet data: bottom edges pin both components, side walls pin x.
  const int ndof = 2 * mesh.node_count();
  std::vector<char> fixed(ndof, 0);
  for (const auto& be : mesh.boundary) {
    for (int n : {be.a, be.b, be.mid}) {
      switch (be.tag) {
        case BoundaryTag::Bottom:
          fixed[2 * n] = fixed[2 * n + 1] = 1;
          break;
        case BoundaryTag::LeftSide:
        case BoundaryTag::RightSide:
          fixed[2 * n] = 1;
          break;
        case BoundaryTag::Traction:
        case BoundaryTag::Free:
          break;
      }
    }
  }
  free_index_.assign(ndof, -1);
  for (int d = 0; d < ndof; ++d) {
    if (!fixed[d]) {
      free_index_[d] = free_count_++;
      free_dofs_.push_back(d);
    }
  }

  // Gravity load vector: per element F . N_i integrated exactly.
  Eigen::VectorXd load_full = Eigen::VectorXd::Zero(ndof);
  const auto& rule = QuadratureRule::triangle7();
  const auto& basis = reference_basis();
  for (size_t e = 0; e < elems_.size(); ++e) {
    const ElementGeom& g = elems_[e];
    const Vec2 f = elem_load_[e];
    for (int q = 0; q < 7; ++q) {
      const double w = 0.5 * rule.points[q].weight * g.det_j;
      for (int i = 0; i < 6; ++i) {
        load_full[2 * g.nodes[i]] += w * basis.value[q][i] * f.x;
        load_full[2 * g.nodes[i] + 1] += w * basis.value[q][i] * f.y;
      }
    }
  }
  load_free_.resize(free_count_);
  for (int k = 0; k < free_count_; ++k) load_free_[k] = load_full[free_dofs_[k]];
  load_scale_ = load_free_.size() > 0 ? load_free_.lpNorm<Eigen::Infinity>() : 0.0;
}

Eigen::VectorXd KinematicSolver::restrict_to_free(const VelocityField& v) const {
  Eigen::VectorXd out(free_count_);
  for (int k = 0; k < free_count_; ++k) out[k] = v.values[free_dofs_[k]];
  return out;
}

VelocityField KinematicSolver::expand(const Eigen::VectorXd& v_free) const {
  VelocityField v;
  v.values = Eigen::VectorXd::Zero(2 * mesh_->node_count());
  for (int k = 0; k < free_count_; ++k) v.values[free_dofs_[k]] = v_free[k];
  return v;
}

double KinematicSolver::load_work(const VelocityField& v) const {
  return load_free_.dot(restrict_to_free(v));
}

SymTensor3 KinematicSolver::strain_at_(const ElementGeom& g,
                                       const Eigen::VectorXd& v_full, int qp) const {
  const auto& basis = reference_basis();
  double exx = 0.0, eyy = 0.0, exy = 0.0;
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector2d dn = g.inv_j.transpose() * basis.grad[qp][i];
    const double vx = v_full[2 * g.nodes[i]], vy = v_full[2 * g.nodes[i] + 1];
    exx += dn.x() * vx;
    eyy += dn.y() * vy;
    exy += 0.5 * (dn.y() * vx + dn.x() * vy);
  }
  return SymTensor3::plane_strain(exx, eyy, exy);
}

std::vector<ConstitutiveParams> KinematicSolver::mobilized(ReductionScheme scheme,
                                                           double lambda) const {
  std::vector<ConstitutiveParams> params;
  params.reserve(materials_->size());
  for (const auto& mat : *materials_) {
    const double q = reduction_factor(scheme, mat.strength, lambda);
    params.push_back(ConstitutiveParams::make(mat.strength, q, mat.elastic));
  }
  return params;
}

KinematicSolver::Assembly KinematicSolver::assemble(
    double alpha, const std::vector<ConstitutiveParams>& params,
    const Eigen::VectorXd& v_free, bool want_tangent) const {
  const auto& rule = QuadratureRule::triangle7();
  const auto& basis = reference_basis();
  const VelocityField v = expand(v_free);

  Assembly out;
  out.gradient = Eigen::VectorXd::Zero(free_count_);
  std::vector<Eigen::Triplet<double>> trips;
  if (want_tangent) trips.reserve(elems_.size() * 144);

  double energy = 0.0;
  Eigen::Matrix<double, 3, 12> b;  // Mandel strain rows x element dofs
  Eigen::Matrix<double, 12, 12> k_local;

  for (const ElementGeom& g : elems_) {
    const ConstitutiveParams& mat = params[g.material];
    if (want_tangent) k_local.setZero();
    Eigen::Matrix<double, 12, 1> f_local = Eigen::Matrix<double, 12, 1>::Zero();

    for (int q = 0; q < 7; ++q) {
      const double w = 0.5 * rule.points[q].weight * g.det_j;
      b.setZero();
      for (int i = 0; i < 6; ++i) {
        const Eigen::Vector2d dn = g.inv_j.transpose() * basis.grad[q][i];
        b(0, 2 * i) = dn.x();
        b(1, 2 * i + 1) = dn.y();
        b(2, 2 * i) = dn.y() / kRoot2;
        b(2, 2 * i + 1) = dn.x() / kRoot2;
      }
      const SymTensor3 eps = strain_at_(g, v.values, q);
      const ConstitutiveResult r = evaluate_t_alpha(eps, alpha, mat);
      energy += w * r.value;

      Eigen::Vector3d stress_m(r.stress.xx, r.stress.yy, kRoot2 * r.stress.xy);
      f_local += w * b.transpose() * stress_m;
      if (want_tangent) {
        Eigen::Matrix3d c;
        const int idx[3] = {0, 1, 3};  // in-plane Mandel slots
        for (int row = 0; row < 3; ++row) {
          for (int col = 0; col < 3; ++col) {
            c(row, col) = r.tangent(idx[row], idx[col]);
          }
        }
        k_local += w * b.transpose() * c * b;
      }
    }

    for (int i = 0; i < 12; ++i) {
      const int di = 2 * g.nodes[i / 2] + (i % 2);
      const int fi = free_index_[di];
      if (fi < 0) continue;
      out.gradient[fi] += f_local[i];
      if (!want_tangent) continue;
      for (int j = 0; j < 12; ++j) {
        const int dj = 2 * g.nodes[j / 2] + (j % 2);
        const int fj = free_index_[dj];
        if (fj >= 0) trips.emplace_back(fi, fj, k_local(i, j));
      }
    }
  }

  out.objective = energy - load_free_.dot(v_free);
  out.gradient -= load_free_;
  if (want_tangent) {
    out.tangent.resize(free_count_, free_count_);
    out.tangent.setFromTriplets(trips.begin(), trips.end());
  }
  return out;
}

double KinematicSolver::objective(double alpha,
                                  const std::vector<ConstitutiveParams>& params,
                                  const Eigen::VectorXd& v_free) const {
  const auto& rule = QuadratureRule::triangle7();
  const VelocityField v = expand(v_free);
  double energy = 0.0;
  for (const ElementGeom& g : elems_) {
    const ConstitutiveParams& mat = params[g.material];
    for (int q = 0; q < 7; ++q) {
      const double w = 0.5 * rule.points[q].weight * g.det_j;
      const SymTensor3 eps = strain_at_(g, v.values, q);
      const ConstitutiveResult r = evaluate_t_alpha(eps, alpha, mat);
      energy += w * r.value;
    }
  }
  return energy - load_free_.dot(v_free);
}

InnerSolveResult KinematicSolver::inner_solve(double alpha,
                                              const std::vector<ConstitutiveParams>& params,
                                              const VelocityField* warm,
                                              const NewtonOptions& opts) const {
  Eigen::VectorXd v = warm != nullptr ? restrict_to_free(*warm)
                                      : Eigen::VectorXd::Zero(free_count_);
  InnerSolveResult res;

  Assembly a = assemble(alpha, params, v, true);
  const double blow_up =
      opts.divergence_factor * std::max(1.0, std::abs(a.objective));
  const double tol = opts.tol_rel * std::max(load_scale_, 1e-300);
  const double stall_tol = opts.stall_rel * std::max(load_scale_, 1e-300);

  double prev_drop = 0.0;
  int streak = 0;
  int stalled = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const double resid = a.gradient.lpNorm<Eigen::Infinity>();
    if (resid <= tol) {
      res.status = InnerSolveStatus::Converged;
      res.history.push_back({it - 1, resid, a.objective, 0.0});
      break;
    }

    // Factor the (slightly shifted) tangent; escalate the shift while the
    // factorization reports failure or returns garbage.
    const double mean_diag =
        std::max(a.tangent.diagonal().cwiseAbs().mean(), 1e-300);
    Eigen::VectorXd d;
    bool solved = false;
    for (double tau = opts.regularization; tau <= 1e6; tau *= 100.0) {
      Eigen::SparseMatrix<double> shifted = a.tangent;
      for (int i = 0; i < free_count_; ++i) {
        shifted.coeffRef(i, i) +=
            tau * std::max(std::abs(a.tangent.coeff(i, i)), 0.01 * mean_diag);
      }
      if (!pattern_ready_) {
        ldlt_.analyzePattern(shifted);
        pattern_ready_ = true;
      }
      ldlt_.factorize(shifted);
      if (ldlt_.info() != Eigen::Success) continue;
      d = ldlt_.solve(-a.gradient);
      if (d.allFinite()) {
        solved = true;
        break;
      }
    }
    if (!solved) {
      throw LinearSolveError("tangent stayed singular after regularization");
    }
    const double slope = a.gradient.dot(d);
    if (!(slope < 0.0)) {
      throw LinearSolveError("computed direction is not a descent direction");
    }

    // Armijo backtracking. The slack term keeps rounding noise in the
    // quadrature sums from rejecting steps once J is flat to machine
    // precision.
    const double noise = 1e-13 * (1.0 + std::abs(a.objective));
    double step = 1.0;
    double j_try = 0.0;
    bool accepted = false;
    for (int ls = 0; ls <= opts.max_backtracks; ++ls) {
      j_try = objective(alpha, params, v + step * d);
      if (j_try <= a.objective + opts.armijo_c1 * step * slope + noise) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      res.status = resid <= stall_tol ? InnerSolveStatus::Converged
                                      : InnerSolveStatus::MaxIter;
      res.history.push_back({it, resid, a.objective, 0.0});
      break;
    }

    const double drop = a.objective - j_try;
    v += step * d;
    res.iterations = it;
    res.history.push_back({it, resid, j_try, step});

    // Progress below noise for several iterations means the minimizer is
    // resolved as sharply as the arithmetic allows; accept if the residual
    // already sits under the stall floor, otherwise report non-convergence
    // instead of grinding out the full iteration budget.
    stalled = drop <= noise ? stalled + 1 : 0;
    if (stalled >= opts.stall_iters) {
      res.status = resid <= stall_tol ? InnerSolveStatus::Converged
                                      : InnerSolveStatus::MaxIter;
      break;
    }

    if (step == 1.0 && j_try < 0.0 && drop > prev_drop) {
      ++streak;
    } else {
      streak = 0;
    }
    prev_drop = drop;

    if (j_try < -blow_up || streak >= opts.runaway_steps) {
      res.status = InnerSolveStatus::Unbounded;
      res.objective = j_try;
      res.v = expand(v);
      return res;
    }

    a = assemble(alpha, params, v, true);
  }

  res.objective = a.objective;
  res.g_alpha = std::max(0.0, -a.objective);
  res.v = expand(v);
  return res;
}

std::vector<double> KinematicSolver::element_dissipation(
    double alpha, const std::vector<ConstitutiveParams>& params,
    const VelocityField& v) const {
  const auto& rule = QuadratureRule::triangle7();
  std::vector<double> out(elems_.size(), 0.0);
  for (size_t e = 0; e < elems_.size(); ++e) {
    const ElementGeom& g = elems_[e];
    const ConstitutiveParams& mat = params[g.material];
    for (int q = 0; q < 7; ++q) {
      const double w = 0.5 * rule.points[q].weight * g.det_j;
      const ConstitutiveResult r = evaluate_t_alpha(strain_at_(g, v.values, q), alpha, mat);
      out[e] += w * r.value;
    }
  }
  return out;
}

std::vector<double> KinematicSolver::element_shear_rate(const VelocityField& v) const {
  const auto& rule = QuadratureRule::triangle7();
  std::vector<double> out(elems_.size(), 0.0);
  for (size_t e = 0; e < elems_.size(); ++e) {
    const ElementGeom& g = elems_[e];
    for (int q = 0; q < 7; ++q) {
      const double w = 0.5 * rule.points[q].weight * g.det_j;
      const SymTensor3 dev = strain_at_(g, v.values, q).deviator();
      out[e] += w * dev.norm();
    }
  }
  return out;
}

}  // namespace optssr
