#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "momlasso/kv_config.hpp"
#include "momlasso/linear_model.hpp"
#include "momlasso/mom_tests.hpp"

namespace momlasso {

struct SolverOptions {
  std::size_t max_iters = 3000;
  std::optional<double> step_size;  ///< unset: 1 / (largest per-block Lipschitz estimate)
  double tol = 1e-6;                ///< stop when the l2 movement of an iterate drops below
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;  ///< redraw the block partition at every iteration
  /// For k > 1 the step at iteration t is step / (1 + t / step_decay); 0 keeps it constant.
  double step_decay = 50.0;
  std::size_t certify_probes = 32;  ///< probes used to rank restarts
  /// For d <= polish_max_dim each restart is refined by a compass
  /// search on its certified radius, down to steps (or radii) of polish_tol
  /// and at most polish_evals radius evaluations.
  std::size_t polish_max_dim = 2;
  double polish_tol = 1e-4;
  std::size_t polish_evals = 1000;

  void validate() const;
  static SolverOptions from_kv(const KeyValues& kv, SolverOptions base);
  static SolverOptions from_kv(const KeyValues& kv);
  void to_kv(KeyValues& kv) const;
};

struct TraceEntry {
  double criterion;   ///< median block mean loss + lambda |t|_1
  std::size_t block;  ///< index of the median block in that iteration's partition
};

struct FitReport {
  Coef t_hat;
  std::size_t k = 0;
  double lambda = 0.0;
  double rho_k = 0.0;
  std::size_t iters = 0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  std::size_t restart = 0;          ///< index of the selected restart
  double certified_radius = -1.0;   ///< set when restarts were ranked, otherwise -1
};

/// Largest eigenvalue of (2/m) X_B^T X_B over the blocks of p, by power iteration.
double block_lipschitz(const Dataset& ds, const BlockPartition& p, std::size_t iterations = 20);

/// MOM-LASSO by median-block proximal descent. Each iteration evaluates the
/// block mean losses of the current iterate, takes a gradient step on the
/// lower-median block and soft-thresholds at step * lambda. With several
/// restarts the one with the smallest certified radius wins (ties: lowest index).
/// In low dimension every restart is polished before the comparison (see SolverOptions).
/// Throws NumericFailure on a non-finite iterate.
FitReport fit_mom_lasso(const Dataset& ds, std::size_t k, double lambda, const SolverOptions& opts,
                        const std::optional<Coef>& init = std::nullopt);

/// Monte-Carlo lower estimate of sup { |g - t|_1 : g beats t }. Each probe
/// draws a direction u with |u|_1 = 1 and finds the largest c >= 0 such that
/// t + c u beats t; the result is the max over probes. Directions depend only
/// on (seed, probe index), so the estimate is nondecreasing in probes. For
/// d <= 2 the probes sweep the l1 sphere along a golden-angle sequence.
double certify_radius(const TestContext& ctx, const Coef& t, std::size_t probes, std::uint64_t seed);

/// Same, on the consecutive partition of ds into k blocks.
double certify_radius(const Dataset& ds, std::size_t k, double lambda, const Coef& t,
                      std::size_t probes, std::uint64_t seed);

/// Largest c >= 0 with t + c u beating t (u is used as given).
double beaten_extent(const TestContext& ctx, const Coef& t, const Coef& u);

}  // namespace momlasso
