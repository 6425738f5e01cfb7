#include "momlasso/isometry.hpp"

#include <random>

#include "momlasso/random.hpp"

namespace momlasso {

IsometrySample isometry_sample(const TestContext& ctx, const Coef& v) {
  const Coef zero = Coef::Zero(v.size());
  IsometrySample s{};
  s.mom_distance = mom_distance(ctx, v, zero);
  s.true_l2 = v.norm();
  s.ratio = s.true_l2 == 0.0 ? 1.0 : s.mom_distance / s.true_l2;
  return s;
}

std::vector<IsometrySample> diagnose_isometry(const Dataset& ds, std::size_t k, std::size_t directions,
                                              std::uint64_t seed) {
  const TestContext ctx(ds, make_partition(ds.n(), k, derive_seed(seed, {0})), 0.0);
  std::vector<IsometrySample> out;
  out.reserve(directions);
  for (std::size_t i = 0; i < directions; ++i) {
    std::mt19937_64 rng(derive_seed(seed, {1, i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    Coef v(static_cast<Eigen::Index>(ds.d()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    out.push_back(isometry_sample(ctx, v));
  }
  return out;
}

}  // namespace momlasso
