#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "optssr/dissipation.hpp"
#include "optssr/mesh.hpp"
#include "optssr/quadrature.hpp"

namespace optssr {

/// Nodal velocity field, components interleaved (vx0, vy0, vx1, vy1, ...).
struct VelocityField {
  Eigen::VectorXd values;

  double vx(int node) const { return values[2 * node]; }
  double vy(int node) const { return values[2 * node + 1]; }
};

enum class InnerSolveStatus { Converged, Unbounded, MaxIter };

/// One accepted Newton iteration, kept for the convergence log.
struct NewtonRecord {
  int iter = 0;
  double residual = 0.0;   // free-dof gradient sup-norm
  double objective = 0.0;  // J after the step
  double step = 0.0;       // accepted line-search fraction
};

/// Outcome of one inner (fixed lambda, fixed alpha) minimization.
struct InnerSolveResult {
  VelocityField v;             // full nodal field, constrained dofs zero
  double objective = 0.0;      // J(v)
  double g_alpha = 0.0;        // max(0, -J), the duality-gap functional
  InnerSolveStatus status = InnerSolveStatus::MaxIter;
  int iterations = 0;
  std::vector<NewtonRecord> history;
};

/// Damped-Newton controls.
struct NewtonOptions {
  double tol_rel = 1e-8;        // residual over load sup-norm
  int max_iter = 120;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double divergence_factor = 1e8;  // |J| blow-up multiple of the load scale
  int runaway_steps = 5;           // consecutive growing full steps => unbounded
  double regularization = 1e-8;    // initial diagonal shift (times diag scale)
  double stall_rel = 1e-6;         // residual floor accepted once progress
                                   // falls below arithmetic noise
  int stall_iters = 3;             // noise-level iterations before stopping
};

/// Discrete kinematic problem on one mesh: minimize
///   J(v) = sum_e sum_q w_q |J_e| D_alpha(eps(v)) - L(v)
/// over velocities honoring the pinned boundary components. Element loops run
/// serially in element order, so results are bitwise reproducible.
///
/// Holds references to the mesh and materials; both must outlive the solver.
class KinematicSolver {
 public:
  KinematicSolver(const TriMesh& mesh, const std::vector<Material>& materials,
                  const WaterTable* water);

  const TriMesh& mesh() const { return *mesh_; }
  int free_dof_count() const { return free_count_; }
  double load_scale() const { return load_scale_; }

  /// Work done by gravity on a full nodal field.
  double load_work(const VelocityField& v) const;

  /// J, its free-dof gradient, and (optionally) the sparse tangent.
  struct Assembly {
    double objective = 0.0;
    Eigen::VectorXd gradient;
    Eigen::SparseMatrix<double> tangent;
  };
  Assembly assemble(double alpha, const std::vector<ConstitutiveParams>& params,
                    const Eigen::VectorXd& v_free, bool want_tangent) const;

  /// Objective only (used by the line search).
  double objective(double alpha, const std::vector<ConstitutiveParams>& params,
                   const Eigen::VectorXd& v_free) const;

  /// Damped Newton from the warm start (or zero). `params` is indexed by
  /// material id.
  InnerSolveResult inner_solve(double alpha, const std::vector<ConstitutiveParams>& params,
                               const VelocityField* warm = nullptr,
                               const NewtonOptions& opts = {}) const;

  /// Mobilized parameters per material id for this scheme and factor.
  std::vector<ConstitutiveParams> mobilized(ReductionScheme scheme, double lambda) const;

  /// Element integrals of D_alpha at v: the refinement indicator.
  std::vector<double> element_dissipation(double alpha,
                                          const std::vector<ConstitutiveParams>& params,
                                          const VelocityField& v) const;

  /// Element integrals of |dev eps(v)|: alternative indicator.
  std::vector<double> element_shear_rate(const VelocityField& v) const;

  Eigen::VectorXd restrict_to_free(const VelocityField& v) const;
  VelocityField expand(const Eigen::VectorXd& v_free) const;

 private:
  struct ElementGeom {
    std::array<int, 6> nodes{};
    double det_j = 0.0;        // twice the corner-triangle area
    Eigen::Matrix2d inv_j;     // reference-to-physical gradient map
    int material = 0;
  };

  void scatter_add_(Eigen::VectorXd& out, int dof, double value) const;
  SymTensor3 strain_at_(const ElementGeom& g, const Eigen::VectorXd& v_full,
                        int qp) const;

  const TriMesh* mesh_;
  const std::vector<Material>* materials_;
  std::vector<ElementGeom> elems_;
  std::vector<Vec2> elem_load_;        // body force per element
  std::vector<int> free_index_;        // full dof -> compact index or -1
  std::vector<int> free_dofs_;         // compact index -> full dof
  int free_count_ = 0;
  Eigen::VectorXd load_free_;          // L restricted to free dofs
  double load_scale_ = 0.0;            // sup-norm of load_free_
  mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  mutable bool pattern_ready_ = false;
};

}  // namespace optssr
