#include "momlasso/lepski.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "momlasso/error.hpp"
#include "momlasso/mom_tests.hpp"
#include "momlasso/random.hpp"

namespace momlasso {

std::vector<std::size_t> geometric_k_values(std::size_t lo, std::size_t hi, std::size_t count) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("invalid K range");
  if (count < 2) throw std::invalid_argument("grid_size must be >= 2");
  std::vector<std::size_t> out;
  const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
    auto k = static_cast<std::size_t>(std::llround(static_cast<double>(lo) * std::pow(ratio, frac)));
    k = std::clamp(k, lo, hi);
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

LepskiGrid build_grid(const Dataset& ds, RateConfig cfg, std::optional<std::size_t> s_hint,
                      std::size_t grid_size, const SolverOptions& opts) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  cfg.n = ds.n();
  cfg.d = ds.d();
  cfg.validate();
  const std::size_t k2 = std::min(k_upper(cfg), ds.n());
  if (k2 < 1) {
    throw ConfigError("K2 = floor(N / (84 theta0^2 theta_r^2)) is below 1: theta constants too large for N");
  }
  const std::size_t k1 = std::max<std::size_t>(1, k_star(cfg, s_hint.value_or(1)));
  if (k1 > k2) {
    throw ConfigError("K* = " + std::to_string(k1) + " exceeds K2 = " + std::to_string(k2) +
                      "; raise c_k2 or lower c_kstar");
  }

  LepskiGrid grid;
  grid.k_values = k1 == k2 ? std::vector<std::size_t>{k1} : geometric_k_values(k1, k2, grid_size);
  for (std::size_t k : grid.k_values) {
    Schedule sched = lambda_window(cfg, k);
    SolverOptions o = opts;
    o.seed = derive_seed(opts.seed, {k});
    FitReport fit = fit_mom_lasso(ds, k, sched.lambda, o);
    fit.rho_k = sched.rho_k;
    grid.mom_radii.push_back(mom_radius(cfg, sched.rho_k));
    grid.partitions.push_back(make_partition(ds.n(), k, derive_seed(opts.seed, {k, 7})));
    grid.schedules.push_back(sched);
    grid.fits.push_back(std::move(fit));
  }
  return grid;
}

Coef project_l1_ball(const Coef& v, const Coef& center, double radius) {
  const Coef diff = v - center;
  if (diff.lpNorm<1>() <= radius) return v;
  if (radius <= 0.0) return center;
  // Sort-based simplex projection of |diff|.
  std::vector<double> mags(static_cast<std::size_t>(diff.size()));
  for (Eigen::Index j = 0; j < diff.size(); ++j) mags[static_cast<std::size_t>(j)] = std::abs(diff[j]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) theta = candidate;
  }
  return center + soft_threshold(diff, theta);
}

LepskiSelection select_k(const LepskiGrid& grid, LepskiVariant variant, const Dataset& ds) {
  const std::size_t count = grid.k_values.size();
  if (count == 0 || grid.fits.size() != count) throw std::invalid_argument("grid is not fitted");

  std::vector<TestContext> contexts;
  contexts.reserve(count);
  for (std::size_t j = 0; j < count; ++j) contexts.emplace_back(ds, grid.partitions[j], 0.0);

  auto satisfies = [&](const Coef& w, std::size_t from) {
    for (std::size_t j = from; j < count; ++j) {
      const double rho = grid.schedules[j].rho_k;
      if ((w - grid.fits[j].t_hat).lpNorm<1>() > rho + 1e-9 * std::max(1.0, rho)) return false;
    }
    if (variant == LepskiVariant::one) return true;
    for (std::size_t j = from; j < count; ++j) {
      const double radius = grid.mom_radii[j];
      if (mom_distance(contexts[j], w, grid.fits[j].t_hat) > radius + 1e-9 * std::max(1.0, radius)) {
        return false;
      }
    }
    return true;
  };

  LepskiSelection sel;
  sel.tested.assign(count, false);
  sel.passed.assign(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    sel.tested[i] = true;
    std::optional<Coef> witness;
    std::string source;
    for (std::size_t j = i; j < count && !witness; ++j) {
      if (satisfies(grid.fits[j].t_hat, i)) {
        witness = grid.fits[j].t_hat;
        source = "fit K=" + std::to_string(grid.k_values[j]);
      }
    }
    for (std::size_t j = i; j < count && !witness; ++j) {
      for (std::size_t jp = i; jp < count && !witness; ++jp) {
        if (j == jp) continue;
        Coef w = project_l1_ball(grid.fits[j].t_hat, grid.fits[jp].t_hat, grid.schedules[jp].rho_k);
        if (satisfies(w, i)) {
          witness = std::move(w);
          source = "projection of K=" + std::to_string(grid.k_values[j]) + " onto ball K=" +
                   std::to_string(grid.k_values[jp]);
        }
      }
    }
    if (witness) {
      sel.passed[i] = true;
      sel.k_hat = grid.k_values[i];
      sel.index = i;
      sel.f_le = std::move(*witness);
      sel.witness = std::move(source);
      return sel;
    }
  }
  sel.fallback = true;
  sel.index = count - 1;
  sel.k_hat = grid.k_values.back();
  sel.f_le = grid.fits.back().t_hat;
  sel.witness = "fallback: largest K";
  return sel;
}

}  // namespace momlasso
