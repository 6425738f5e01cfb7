#include "momlasso/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace momlasso {

GridOracleResult fit_grid_oracle(const TestContext& ctx, std::span<const Coef> grid,
                                 Criterion criterion, const std::optional<RateConfig>& link) {
  if (grid.empty()) throw std::invalid_argument("grid oracle needs a nonempty grid");
  if (criterion == Criterion::two_norm && !link) {
    throw std::invalid_argument("two-norm criterion needs a link function configuration");
  }
  const Dataset& ds = ctx.dataset();
  const BlockPartition& p = ctx.partition();
  const std::size_t g_count = grid.size();
  const std::size_t k = p.k();

  // Block means laid out flat, one row of k per grid point.
  std::vector<double> means(g_count * k);
  std::vector<double> penalty(g_count);
  for (std::size_t i = 0; i < g_count; ++i) {
    const auto row = block_means(loss_values(ds, grid[i]), p);
    std::copy(row.begin(), row.end(), means.begin() + static_cast<std::ptrdiff_t>(i * k));
    penalty[i] = ctx.lambda() * l1_norm(grid[i]);
  }
  const std::size_t lo_pos = (k + 1) / 2 - 1;  // ceil(k/2) - 1
  const std::size_t hi_pos = k - (k + 1) / 2;

  // Visit f nearest the grid centroid first so a small incumbent radius is found early.
  Coef centroid = Coef::Zero(grid[0].size());
  for (const auto& c : grid) centroid += c;
  centroid /= static_cast<double>(g_count);
  std::vector<std::size_t> order(g_count);
  std::vector<double> spread(g_count);
  for (std::size_t i = 0; i < g_count; ++i) {
    order[i] = i;
    spread[i] = (grid[i] - centroid).lpNorm<1>();
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spread[a] < spread[b]; });

  GridOracleResult result;
  result.criteria.assign(g_count, 0.0);
  std::vector<double> diff(k);
  double incumbent = std::numeric_limits<double>::infinity();
  for (const std::size_t f : order) {
    const double* mf = means.data() + f * k;
    double radius = 0.0;
    double mom_radius2 = 0.0;
    for (std::size_t g = 0; g < g_count; ++g) {
      if (g == f) continue;
      const double dist = (grid[g] - grid[f]).lpNorm<1>();
      if (criterion == Criterion::reg && dist <= radius) continue;
      const double* mg = means.data() + g * k;
      for (std::size_t j = 0; j < k; ++j) diff[j] = mf[j] - mg[j];
      std::sort(diff.begin(), diff.end());
      const double t = QuantileInterval{diff[lo_pos], diff[hi_pos], 0.5}.midpoint() + (penalty[f] - penalty[g]);
      if (t < 0.0) continue;
      radius = std::max(radius, dist);
      if (criterion == Criterion::two_norm) {
        mom_radius2 = std::max(mom_radius2, mom_distance(ctx, grid[g], grid[f]));
      }
      // strictly worse than a finished point: the partial radius already rules f out
      if (radius > incumbent) break;
    }
    if (criterion == Criterion::reg) {
      result.criteria[f] = radius;
    } else {
      const double needed = link_r_inverse(*link, mom_radius2 / (85.0 * link->theta_r));
      result.criteria[f] = std::max(radius, needed);
    }
    if (radius <= incumbent) incumbent = std::min(incumbent, result.criteria[f]);
  }
  const auto it = std::min_element(result.criteria.begin(), result.criteria.end());
  result.index = static_cast<std::size_t>(it - result.criteria.begin());
  result.criterion = *it;
  result.best = grid[result.index];
  return result;
}

GridOracleResult fit_grid_oracle(const Dataset& ds, std::size_t k, double lambda,
                                 std::span<const Coef> grid, Criterion criterion,
                                 const std::optional<RateConfig>& link) {
  const TestContext ctx(ds, make_partition(ds.n(), k), lambda);
  return fit_grid_oracle(ctx, grid, criterion, link);
}

std::vector<Coef> make_box_grid(const Coef& center, double half_width, double step) {
  if (!(step > 0.0) || !(half_width >= 0.0)) throw std::invalid_argument("invalid grid extent");
  const auto d = static_cast<std::size_t>(center.size());
  if (d == 0) throw std::invalid_argument("grid needs dimension >= 1");
  const auto m = static_cast<long>(std::llround(half_width / step));
  const auto side = static_cast<std::size_t>(2 * m + 1);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (total > 50'000'000 / side) throw std::invalid_argument("grid too large");
    total *= side;
  }
  std::vector<Coef> grid;
  grid.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Coef c = center;
    std::size_t rest = idx;
    for (std::size_t j = 0; j < d; ++j) {
      const auto offset = static_cast<long>(rest % side) - m;
      rest /= side;
      c[static_cast<Eigen::Index>(j)] += step * static_cast<double>(offset);
    }
    grid.push_back(std::move(c));
  }
  return grid;
}

}  // namespace momlasso
