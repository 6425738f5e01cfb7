#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>

#include "momlasso/error.hpp"
#include "momlasso/lepski.hpp"
#include "momlasso/simulate.hpp"

using namespace momlasso;

namespace {

// Grid with prescribed centers and radii on a small dataset.
LepskiGrid synthetic_grid(const Dataset& ds, const std::vector<Coef>& centers, const std::vector<double>& rho,
                          double mom_r = 1e9) {
  LepskiGrid g;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const std::size_t k = j + 1;
    g.k_values.push_back(k);
    Schedule s{};
    s.k = k;
    s.rho_k = rho[j];
    g.schedules.push_back(s);
    FitReport f;
    f.t_hat = centers[j];
    f.k = k;
    g.fits.push_back(f);
    g.mom_radii.push_back(mom_r);
    g.partitions.push_back(make_partition(ds.n(), k));
  }
  return g;
}

Dataset small_data() {
  GenSpec spec;
  spec.n = 60;
  spec.d = 3;
  spec.s = 2;
  spec.seed = 8;
  return generate(spec);
}

Coef vec3(double a, double b, double c) { return (Coef(3) << a, b, c).finished(); }

}  // namespace

TEST_CASE("geometric K values") {
  CHECK(geometric_k_values(3, 23, 2) == std::vector<std::size_t>{3, 23});
  CHECK(geometric_k_values(1, 1, 4) == std::vector<std::size_t>{1});
  for (std::size_t count = 2; count < 12; ++count) {
    const auto v = geometric_k_values(2, 60, count);
    CHECK(v.front() == 2);
    CHECK(v.back() == 60);
    CHECK(std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end());
    CHECK(v.size() <= count);
  }
  CHECK_THROWS_AS(geometric_k_values(0, 5, 3), std::invalid_argument);
  CHECK_THROWS_AS(geometric_k_values(5, 4, 3), std::invalid_argument);
  CHECK_THROWS_AS(geometric_k_values(1, 5, 1), std::invalid_argument);
}

TEST_CASE("grid construction") {
  GenSpec spec;
  spec.n = 2000;
  spec.d = 20;
  spec.s = 3;
  spec.seed = 3;
  const auto ds = generate(spec);
  RateConfig cfg;
  cfg.n = ds.n();
  cfg.d = ds.d();
  CHECK(k_upper(cfg) == 23);

  SolverOptions opts;
  opts.max_iters = 200;
  const auto grid = build_grid(ds, cfg, std::nullopt, 2, opts);
  CHECK(grid.k_values == std::vector<std::size_t>{1, 23});
  REQUIRE(grid.fits.size() == 2);
  CHECK(grid.fits[1].k == 23);
  CHECK(grid.fits[1].lambda == grid.schedules[1].lambda);
  CHECK(grid.mom_radii[1] == doctest::Approx(mom_radius(cfg, grid.schedules[1].rho_k)));

  const auto wide = build_grid(ds, cfg, 3, 5, opts);
  CHECK(wide.k_values.front() == std::max<std::size_t>(1, k_star(cfg, 3)));
  CHECK(wide.k_values.back() == 23);
  CHECK(std::adjacent_find(wide.k_values.begin(), wide.k_values.end(), std::greater_equal<>()) ==
        wide.k_values.end());

  auto tight = cfg;
  tight.theta0 = 10.0;
  CHECK_THROWS_AS(build_grid(ds, tight, std::nullopt, 3, opts), ConfigError);
  CHECK_THROWS_AS(build_grid(ds, cfg, std::nullopt, 1, opts), std::invalid_argument);
}

TEST_CASE("identical fits select the smallest K") {
  const auto ds = small_data();
  const Coef t = vec3(1, -2, 0.5);
  const auto grid = synthetic_grid(ds, {t, t, t, t}, {0.1, 0.2, 0.3, 0.4});
  for (auto variant : {LepskiVariant::one, LepskiVariant::two}) {
    const auto sel = select_k(grid, variant, ds);
    CHECK(sel.k_hat == 1);
    CHECK(sel.index == 0);
    CHECK(sel.f_le == t);
    CHECK_FALSE(sel.fallback);
  }
}

TEST_CASE("disjoint balls fail the pairwise condition") {
  const auto ds = small_data();
  // |t1 - t2|_1 = 3 > rho1 + rho2 = 1, other pairs intersect
  const auto grid = synthetic_grid(ds, {vec3(0, 0, 0), vec3(3, 0, 0), vec3(3.1, 0, 0)}, {0.5, 0.5, 0.5});
  const auto sel = select_k(grid, LepskiVariant::one, ds);
  CHECK(sel.tested[0]);
  CHECK_FALSE(sel.passed[0]);
  CHECK(sel.k_hat == 2);
  CHECK(sel.passed[1]);
  CHECK((sel.f_le - vec3(3, 0, 0)).lpNorm<1>() <= 0.5 + 1e-9);
  CHECK((sel.f_le - vec3(3.1, 0, 0)).lpNorm<1>() <= 0.5 + 1e-9);

  // the largest K always accepts its own fit, so no fallback is needed
  const auto far = synthetic_grid(ds, {vec3(0, 0, 0), vec3(5, 0, 0)}, {0.5, 0.5});
  const auto last = select_k(far, LepskiVariant::two, ds);
  CHECK_FALSE(last.fallback);
  CHECK_FALSE(last.passed[0]);
  CHECK(last.k_hat == 2);
  CHECK(last.f_le == vec3(5, 0, 0));
}

TEST_CASE("projections serve as witnesses") {
  const auto ds = small_data();
  // centers 1.5 apart with radii 1: neither center lies in the other ball
  const auto grid = synthetic_grid(ds, {vec3(0, 0, 0), vec3(1.5, 0, 0)}, {1.0, 1.0});
  const auto sel = select_k(grid, LepskiVariant::one, ds);
  CHECK(sel.k_hat == 1);
  CHECK(sel.witness.find("projection") != std::string::npos);
  CHECK((sel.f_le - vec3(0, 0, 0)).lpNorm<1>() <= 1.0 + 1e-9);
  CHECK((sel.f_le - vec3(1.5, 0, 0)).lpNorm<1>() <= 1.0 + 1e-9);
}

TEST_CASE("variant two also bounds the mom distance") {
  const auto ds = small_data();
  const Coef a = vec3(0, 0, 0);
  const Coef b = vec3(0.3, 0, 0);
  const auto loose = synthetic_grid(ds, {a, b}, {1.0, 1.0}, 1e9);
  CHECK(select_k(loose, LepskiVariant::two, ds).k_hat == 1);
  // a mom radius below the distance between the two fits rules out both as witnesses
  const TestContext ctx(ds, make_partition(ds.n(), 1), 0.0);
  const double dist = mom_distance(ctx, a, b);
  REQUIRE(dist > 0.0);
  auto strict = synthetic_grid(ds, {a, b}, {1.0, 1.0}, 0.1 * dist);
  const auto sel = select_k(strict, LepskiVariant::two, ds);
  CHECK(sel.k_hat == 2);
  CHECK(select_k(strict, LepskiVariant::one, ds).k_hat == 1);
}

TEST_CASE("l1 ball projection") {
  const Coef c = vec3(1, 1, 1);
  CHECK(project_l1_ball(vec3(1.2, 1, 1), c, 0.5) == vec3(1.2, 1, 1));
  CHECK(project_l1_ball(vec3(4, 1, 1), c, 1.0).isApprox(vec3(2, 1, 1)));
  CHECK(project_l1_ball(vec3(4, 3, 1), c, 0.0) == c);
  // (3, 1) shifted by 1 keeps 2 mass on the first coordinate
  CHECK(project_l1_ball(vec3(4, 2, 1), c, 2.0).isApprox(vec3(3, 1, 1)));

  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 8);
    Coef v(d), ctr(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      v[j] = 3.0 * normal(rng);
      ctr[j] = normal(rng);
    }
    const double r = 2.0 * unit(rng);
    const Coef p = project_l1_ball(v, ctr, r);
    CHECK((p - ctr).lpNorm<1>() <= r * (1.0 + 1e-12) + 1e-12);
    CHECK(project_l1_ball(p, ctr, r).isApprox(p, 1e-12));
    // no random feasible point is closer in l2
    for (int probe = 0; probe < 30; ++probe) {
      Coef q(d);
      for (Eigen::Index j = 0; j < d; ++j) q[j] = normal(rng);
      q = ctr + q * (r * unit(rng) / std::max(q.lpNorm<1>(), 1e-300));
      CHECK((v - p).norm() <= (v - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("acceptance is monotone and variant two holds at the selection") {
  GenSpec spec;
  spec.n = 600;
  spec.d = 10;
  spec.s = 2;
  spec.noise.kind = NoiseKind::student_t;
  spec.outlier_count = 5;
  spec.outliers.kind = OutlierKind::response_blowup;
  spec.seed = 12;
  const auto ds = generate(spec);
  RateConfig cfg;
  cfg.theta0 = 1.0;
  cfg.c_k2 = 4.0;
  SolverOptions opts;
  opts.max_iters = 300;
  const auto grid = build_grid(ds, cfg, 2, 5, opts);
  const auto sel = select_k(grid, LepskiVariant::two, ds);
  const std::size_t i = sel.index;
  CHECK(grid.k_values[i] == sel.k_hat);
  if (!sel.fallback) {
    CHECK((sel.f_le - grid.fits[i].t_hat).lpNorm<1>() <= grid.schedules[i].rho_k * (1.0 + 1e-9) + 1e-9);
    const TestContext ctx(ds, grid.partitions[i], 0.0);
    CHECK(mom_distance(ctx, sel.f_le, grid.fits[i].t_hat) <= grid.mom_radii[i] * (1.0 + 1e-9));
    // the same witness satisfies every constraint from larger K on
    for (std::size_t j = i; j < grid.k_values.size(); ++j) {
      CHECK((sel.f_le - grid.fits[j].t_hat).lpNorm<1>() <= grid.schedules[j].rho_k * (1.0 + 1e-9) + 1e-9);
      const TestContext cj(ds, grid.partitions[j], 0.0);
      CHECK(mom_distance(cj, sel.f_le, grid.fits[j].t_hat) <= grid.mom_radii[j] * (1.0 + 1e-9));
    }
  }
  for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(sel.passed[j]);
}
