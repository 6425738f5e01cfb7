#include "momlasso/mom_tests.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace momlasso {

TestContext::TestContext(const Dataset& ds, BlockPartition partition, double lambda)
    : ds_(ds), partition_(std::move(partition)), lambda_(lambda) {
  if (partition_.n_total() != ds.n()) {
    throw std::invalid_argument("partition does not cover the dataset");
  }
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
}

double test_stat(const TestContext& ctx, const Coef& g, const Coef& f) {
  const Dataset& ds = ctx.dataset();
  require_dimension(ds, g);
  require_dimension(ds, f);
  const Vector rf = ds.ys() - ds.xs() * f;
  const Vector rg = ds.ys() - ds.xs() * g;
  std::vector<double> diff(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    diff[i] = rf[e] * rf[e] - rg[e] * rg[e];
  }
  return mom(diff, ctx.partition()) + ctx.lambda() * (l1_norm(f) - l1_norm(g));
}

bool beats(const TestContext& ctx, const Coef& g, const Coef& f) {
  return test_stat(ctx, g, f) >= 0.0;
}

double mom_distance(const TestContext& ctx, const Coef& g, const Coef& f) {
  const Dataset& ds = ctx.dataset();
  require_dimension(ds, g);
  require_dimension(ds, f);
  const Vector proj = ds.xs() * (g - f);
  std::vector<double> values(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) values[i] = std::abs(proj[static_cast<Eigen::Index>(i)]);
  return mom(values, ctx.partition());
}

}  // namespace momlasso
