#pragma once

#include <optional>
#include <vector>

#include "optssr/fem.hpp"

namespace optssr {

/// Derivative-free hill-climb controls for the outer maximization of
/// omega(lambda) = lambda - G_alpha(lambda).
struct SearchOptions {
  double lambda_start = 0.5;
  double step = 0.1;
  double tol = 1e-3;        // terminal step size
  double lambda_min = 0.1;  // search window
  double lambda_max = 10.0;
  NewtonOptions newton;
};

/// One probed reduction factor.
struct SearchPoint {
  double lambda = 0.0;
  double omega = 0.0;  // lambda - G_alpha; -inf encoded by feasible=false
  double g_alpha = 0.0;
  bool feasible = false;  // inner solve converged
  int iterations = 0;
};

struct FosSearchResult {
  double lambda_star = 0.0;
  double omega_star = 0.0;  // lambda* - G_alpha(lambda*)
  VelocityField velocity;   // inner minimizer at lambda*
  std::vector<SearchPoint> probes;
  long inner_iterations = 0;
};

/// Row of the convergence CSV.
struct ConvergenceRow {
  int level = 0;
  double lambda = 0.0;
  double alpha = 0.0;
  int iter = 0;
  double residual = 0.0;
  double objective = 0.0;
  double step = 0.0;
};
using ConvergenceLog = std::vector<ConvergenceRow>;

/// Maximize lambda - G_alpha(lambda) by adaptive-step hill climbing with
/// warm-started inner solves. Starts at lambda_start (walking down first if
/// that point is already unstable) and stops when the step falls under tol.
/// Throws SearchFailure when no feasible lambda exists down to lambda_min.
FosSearchResult fos_search(const KinematicSolver& solver, ReductionScheme scheme,
                           double alpha, const SearchOptions& opts = {},
                           const VelocityField* warm = nullptr,
                           ConvergenceLog* log = nullptr, int log_level = 0);

struct ContinuationStep {
  double alpha = 0.0;
  double lambda_star = 0.0;
  double omega_star = 0.0;
};

struct ContinuationResult {
  std::vector<ContinuationStep> steps;
  double alpha = 0.0;        // accepted regularization
  double lambda_star = 0.0;  // factor at the accepted step
};

/// Walk an increasing alpha schedule, warm-starting each search, and accept
/// the first alpha whose factor moved less than `accept_tol` from the
/// previous one (capping at the schedule end).
ContinuationResult alpha_continuation(const KinematicSolver& solver, ReductionScheme scheme,
                                      const std::vector<double>& schedule = {10.0, 100.0, 1000.0},
                                      const SearchOptions& opts = {}, double accept_tol = 0.01,
                                      ConvergenceLog* log = nullptr);

struct LevelRecord {
  int level = 0;
  int elements = 0;
  int nodes = 0;
  double lambda_star = 0.0;
  double omega_star = 0.0;
  long inner_iterations = 0;
  double seconds = 0.0;
};

enum class IndicatorKind { Dissipation, ShearRate };

struct AdaptiveOptions {
  int levels = 12;
  double alpha = 1000.0;
  bool alpha_auto = false;  // pick alpha by continuation on the first level
  double marking_fraction = 0.2;
  IndicatorKind indicator = IndicatorKind::Dissipation;
  SearchOptions search;
};

/// Per-level state kept for visualization artifacts and replaying the mesh
/// trajectory under other schemes. `origins` maps this level's nodes into the
/// previous level's elements (empty on level 0).
struct LevelState {
  TriMesh mesh;
  VelocityField velocity;
  std::vector<double> indicator;
  std::vector<NodeOrigin> origins;
};

struct FosReport {
  ReductionScheme scheme = ReductionScheme::Associated;
  double alpha = 0.0;
  double fos = 0.0;  // factor on the finest level
  std::vector<LevelRecord> levels;
  double seconds = 0.0;
};

/// Full adaptive loop: search on the current mesh, refine where the
/// dissipation concentrates, transfer the minimizer, repeat. `states`, when
/// non-null, receives mesh/velocity/indicator per level.
FosReport adaptive_fos(const TriMesh& initial, const std::vector<Material>& materials,
                       const WaterTable* water, ReductionScheme scheme,
                       const AdaptiveOptions& opts = {},
                       std::vector<LevelState>* states = nullptr,
                       ConvergenceLog* log = nullptr);

/// Nodal speed |v| scaled so the maximum is one (all-zero fields pass
/// through unchanged).
std::vector<double> failure_field(const TriMesh& mesh, const VelocityField& v);

/// P2 interpolation of a parent-mesh nodal field at the given origins (one
/// per node of the finer mesh).
VelocityField prolong_field(const TriMesh& coarse, const VelocityField& v,
                            const std::vector<NodeOrigin>& origins);

}  // namespace optssr
