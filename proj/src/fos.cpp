#include "optssr/fos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

double p2_basis(int i, const std::array<double, 3>& l) {
  if (i < 3) return l[i] * (2.0 * l[i] - 1.0);
  const int pair[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  return 4.0 * l[pair[i - 3][0]] * l[pair[i - 3][1]];
}

struct Probe {
  bool feasible = false;
  double omega = 0.0;
  double g_alpha = 0.0;
  int iterations = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

VelocityField prolong_field(const TriMesh& coarse, const VelocityField& v,
                            const std::vector<NodeOrigin>& origins) {
  VelocityField out;
  out.values = Eigen::VectorXd::Zero(2 * static_cast<int>(origins.size()));
  for (size_t n = 0; n < origins.size(); ++n) {
    const NodeOrigin& o = origins[n];
    const auto& host = coarse.elements[o.element];
    double vx = 0.0, vy = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double w = p2_basis(i, o.bary);
      vx += w * v.values[2 * host[i]];
      vy += w * v.values[2 * host[i] + 1];
    }
    out.values[2 * n] = vx;
    out.values[2 * n + 1] = vy;
  }
  return out;
}

FosSearchResult fos_search(const KinematicSolver& solver, ReductionScheme scheme,
                           double alpha, const SearchOptions& opts,
                           const VelocityField* warm, ConvergenceLog* log,
                           int log_level) {
  if (!(opts.lambda_min > 0.0) || !(opts.lambda_max > opts.lambda_min)) {
    throw ConfigError("search window must satisfy 0 < lambda_min < lambda_max");
  }

  FosSearchResult res;
  std::map<double, Probe> cache;
  VelocityField best_v;
  bool have_best_v = false;

  const auto evaluate = [&](double lambda) -> Probe {
    if (const auto it = cache.find(lambda); it != cache.end()) return it->second;
    const VelocityField* start = have_best_v ? &best_v : warm;
    const InnerSolveResult inner =
        solver.inner_solve(alpha, solver.mobilized(scheme, lambda), start, opts.newton);

    Probe p;
    p.feasible = inner.status == InnerSolveStatus::Converged;
    p.g_alpha = inner.g_alpha;
    p.omega = lambda - inner.g_alpha;
    p.iterations = inner.iterations;
    res.inner_iterations += inner.iterations;
    if (log != nullptr) {
      for (const auto& rec : inner.history) {
        log->push_back({log_level, lambda, alpha, rec.iter, rec.residual,
                        rec.objective, rec.step});
      }
    }
    res.probes.push_back({lambda, p.omega, p.g_alpha, p.feasible, p.iterations});
    if (p.feasible) {
      // Keep the minimizer of the best lambda seen so far as warm start.
      if (!have_best_v || p.omega >= res.omega_star) {
        best_v = inner.v;
        have_best_v = true;
      }
    }
    cache.emplace(lambda, p);
    return p;
  };

  // Starting point; if it is already past collapse, walk down the window.
  double lambda = std::clamp(opts.lambda_start, opts.lambda_min, opts.lambda_max);
  Probe cur = evaluate(lambda);
  while (!cur.feasible && lambda > opts.lambda_min) {
    lambda = std::max(opts.lambda_min, lambda - opts.step);
    cur = evaluate(lambda);
  }
  if (!cur.feasible) {
    throw SearchFailure("no stable reduction factor at the lower search bound");
  }

  res.lambda_star = lambda;
  res.omega_star = cur.omega;

  double step = opts.step;
  while (step >= opts.tol) {
    bool improved = false;
    for (const double dir : {+1.0, -1.0}) {
      const double cand =
          std::clamp(res.lambda_star + dir * step, opts.lambda_min, opts.lambda_max);
      if (cand == res.lambda_star) continue;
      const Probe p = evaluate(cand);
      if (p.feasible && p.omega > res.omega_star) {
        res.lambda_star = cand;
        res.omega_star = p.omega;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }

  // best_v tracks the highest feasible omega, which is the reported point.
  res.velocity = best_v;
  return res;
}

ContinuationResult alpha_continuation(const KinematicSolver& solver,
                                      ReductionScheme scheme,
                                      const std::vector<double>& schedule,
                                      const SearchOptions& opts, double accept_tol,
                                      ConvergenceLog* log) {
  if (schedule.empty()) throw ConfigError("alpha schedule must not be empty");

  ContinuationResult res;
  VelocityField warm;
  bool have_warm = false;
  double prev = 0.0;

  for (size_t i = 0; i < schedule.size(); ++i) {
    const double alpha = schedule[i];
    SearchOptions local = opts;
    if (i > 0) {
      // Later alphas move the optimum only slightly; search near it.
      local.lambda_start = prev;
      local.step = std::max(opts.tol * 4.0, opts.step / 4.0);
    }
    const FosSearchResult r = fos_search(solver, scheme, alpha, local,
                                         have_warm ? &warm : nullptr, log,
                                         static_cast<int>(i));
    res.steps.push_back({alpha, r.lambda_star, r.omega_star});
    res.alpha = alpha;
    res.lambda_star = r.lambda_star;
    warm = r.velocity;
    have_warm = true;
    if (i > 0 && std::abs(r.lambda_star - prev) <= accept_tol) break;
    prev = r.lambda_star;
  }
  return res;
}

FosReport adaptive_fos(const TriMesh& initial, const std::vector<Material>& materials,
                       const WaterTable* water, ReductionScheme scheme,
                       const AdaptiveOptions& opts, std::vector<LevelState>* states,
                       ConvergenceLog* log) {
  if (opts.levels < 1) throw ConfigError("level count must be at least 1");
  const auto t_start = std::chrono::steady_clock::now();

  FosReport report;
  report.scheme = scheme;
  report.alpha = opts.alpha;

  TriMesh mesh = initial;
  VelocityField warm;
  bool have_warm = false;
  std::vector<NodeOrigin> pending_origins;  // mapping into the previous level

  for (int level = 0; level < opts.levels; ++level) {
    const auto t_level = std::chrono::steady_clock::now();
    const KinematicSolver solver(mesh, materials, water);

    SearchOptions search = opts.search;
    if (level == 0 && opts.alpha_auto) {
      const ContinuationResult cont =
          alpha_continuation(solver, scheme, {10.0, 100.0, 1000.0}, search,
                             0.01, log);
      report.alpha = cont.alpha;
    }
    if (level > 0) {
      // The factor moves little between levels; restart near the previous one.
      search.lambda_start = report.levels.back().lambda_star;
      search.step = std::max(search.tol * 4.0, opts.search.step / 4.0);
    }

    const FosSearchResult r =
        fos_search(solver, scheme, report.alpha, search,
                   have_warm ? &warm : nullptr, log, level);

    const std::vector<double> indicator =
        opts.indicator == IndicatorKind::Dissipation
            ? solver.element_dissipation(report.alpha,
                                         solver.mobilized(scheme, r.lambda_star),
                                         r.velocity)
            : solver.element_shear_rate(r.velocity);

    report.levels.push_back({level, mesh.element_count(), mesh.node_count(),
                             r.lambda_star, r.omega_star, r.inner_iterations,
                             seconds_since(t_level)});
    if (states != nullptr) {
      states->push_back({mesh, r.velocity, indicator, std::move(pending_origins)});
    }
    pending_origins.clear();

    if (level + 1 < opts.levels) {
      Refinement ref = refine(mesh, indicator, opts.marking_fraction);
      warm = prolong_field(mesh, r.velocity, ref.origins);
      have_warm = true;
      mesh = std::move(ref.mesh);
      pending_origins = std::move(ref.origins);
    }
  }

  report.fos = report.levels.back().lambda_star;
  report.seconds = seconds_since(t_start);
  return report;
}

std::vector<double> failure_field(const TriMesh& mesh, const VelocityField& v) {
  std::vector<double> speed(mesh.node_count(), 0.0);
  double peak = 0.0;
  for (int n = 0; n < mesh.node_count(); ++n) {
    speed[n] = std::hypot(v.vx(n), v.vy(n));
    peak = std::max(peak, speed[n]);
  }
  if (peak > 0.0) {
    for (double& s : speed) s /= peak;
  }
  return speed;
}

}  // namespace optssr
