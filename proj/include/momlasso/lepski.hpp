#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "momlasso/blocks.hpp"
#include "momlasso/rates.hpp"
#include "momlasso/solver.hpp"

namespace momlasso {

/// Fits over a geometric grid of block counts together with the radii of
/// their confidence sets.
struct LepskiGrid {
  std::vector<std::size_t> k_values;  ///< strictly increasing
  std::vector<Schedule> schedules;
  std::vector<FitReport> fits;
  std::vector<double> mom_radii;  ///< 28900 theta_r^2 theta0 r(rho_K), times c_mom_radius
  std::vector<BlockPartition> partitions;  ///< per-K partition used by mom_distance
};

enum class LepskiVariant { one, two };

struct LepskiSelection {
  std::size_t k_hat = 0;
  std::size_t index = 0;  ///< position of k_hat in the grid
  Coef f_le;
  bool fallback = false;  ///< no grid K passed; largest K used
  std::string witness;    ///< how the accepted point was produced
  std::vector<bool> tested;  ///< per K: intersection test was run
  std::vector<bool> passed;  ///< per K: intersection test succeeded
};

/// K values between max(1, k_star(s_hint or 1)) and k_upper(cfg), spaced
/// geometrically; each is fitted at its schedule's lambda. n and d are taken
/// from the dataset. Throws ConfigError when k_upper < 1 or k_star > k_upper.
LepskiGrid build_grid(const Dataset& ds, RateConfig cfg, std::optional<std::size_t> s_hint,
                      std::size_t grid_size, const SolverOptions& opts);

/// Geometric grid of integers in [lo, hi], endpoints included, duplicates removed.
std::vector<std::size_t> geometric_k_values(std::size_t lo, std::size_t hi, std::size_t count);

/// Smallest grid K whose confidence sets for all J >= K share a witness point.
/// Witnesses are the fits t_J (J >= K) followed by the l1-ball projections of
/// t_J onto B(t_J', rho_J'), tried in that order.
LepskiSelection select_k(const LepskiGrid& grid, LepskiVariant variant, const Dataset& ds);

/// Euclidean projection of v onto the l1 ball of given radius around center.
Coef project_l1_ball(const Coef& v, const Coef& center, double radius);

}  // namespace momlasso
