#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "momlasso/mom_tests.hpp"
#include "momlasso/rates.hpp"

namespace momlasso {

enum class Criterion {
  reg,       ///< sup of |g - f|_1 over the beaten set
  two_norm,  ///< smallest rho bounding the l1 radius with MOM radius <= 85 theta_r r(rho)
};

struct GridOracleResult {
  Coef best;
  std::size_t index = 0;
  double criterion = 0.0;
  std::vector<double> criteria;  ///< per grid point; exact wherever it is <= criterion
};

/// Literal Le Cam estimator over a finite grid: for each f, the beaten set is
/// { g in grid : T(g, f) >= 0 } and the returned point minimizes its radius
/// (ties: smallest grid index). The two-norm criterion needs `link`.
/// Block means of each grid loss are computed once, so T(g, f) is formed as a
/// difference of block means (equal to test_stat up to rounding). A point whose
/// partial radius already exceeds a finished one stops early with that lower bound.
GridOracleResult fit_grid_oracle(const TestContext& ctx, std::span<const Coef> grid,
                                 Criterion criterion,
                                 const std::optional<RateConfig>& link = std::nullopt);

/// Consecutive partition of ds into k blocks.
GridOracleResult fit_grid_oracle(const Dataset& ds, std::size_t k, double lambda,
                                 std::span<const Coef> grid, Criterion criterion,
                                 const std::optional<RateConfig>& link = std::nullopt);

/// Axis-aligned grid center + step * {-m..m}^d with m = round(half_width / step).
std::vector<Coef> make_box_grid(const Coef& center, double half_width, double step);

}  // namespace momlasso
