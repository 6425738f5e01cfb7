#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "momlasso/baseline.hpp"
#include "momlasso/campaign.hpp"
#include "momlasso/isometry.hpp"
#include "momlasso/metrics.hpp"
#include "momlasso/simulate.hpp"

using namespace momlasso;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "momlasso_test_harness";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CampaignConfig small_campaign() {
  GenSpec spec;
  spec.n = 120;
  spec.d = 8;
  spec.s = 2;
  spec.noise.kind = NoiseKind::student_t;
  spec.outlier_count = 3;
  spec.outliers.kind = OutlierKind::response_blowup;
  CampaignConfig cfg;
  cfg.specs = {spec};
  cfg.methods = {Method::mom_lasso};
  cfg.replications = 3;
  cfg.base_seed = 5;
  cfg.solver.max_iters = 300;
  return cfg;
}

}  // namespace

TEST_CASE("generator examples") {
  GenSpec spec;
  spec.n = 50;
  spec.d = 6;
  spec.s = 3;
  spec.noise.scale = 0.0;
  spec.seed = 2;
  const auto ds = generate(spec);
  REQUIRE(ds.meta());
  const Vector fitted = ds.xs() * ds.meta()->t_star;
  for (Eigen::Index i = 0; i < fitted.size(); ++i) CHECK(ds.ys()[i] == fitted[i]);
  CHECK(ds.outlier_count() == 0);
  std::size_t support = 0;
  for (Eigen::Index j = 0; j < 6; ++j) support += ds.meta()->t_star[j] != 0.0;
  CHECK(support == 3);

  spec.n = 200;
  spec.outlier_count = 20;
  spec.outliers.kind = OutlierKind::response_blowup;
  spec.outliers.magnitude = 1e6;
  const auto dirty = generate(spec);
  CHECK(dirty.outlier_count() == 20);
  const Vector clean_part = dirty.xs() * dirty.meta()->t_star;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    if (dirty.meta()->outlier_mask[i]) {
      CHECK(std::abs(dirty.ys()[e]) >= 1e6 - std::abs(clean_part[e]));
    } else {
      CHECK(dirty.ys()[e] == clean_part[e]);
    }
  }

  // same seed, same data; the outlier-free twin shares every clean sample
  const auto again = generate(spec);
  CHECK(again.xs() == dirty.xs());
  CHECK(again.ys() == dirty.ys());
  auto twin_spec = spec;
  twin_spec.outlier_count = 0;
  twin_spec.outliers.kind = OutlierKind::none;
  const auto twin = generate(twin_spec);
  CHECK(twin.xs() == dirty.xs());
  CHECK(twin.meta()->t_star == dirty.meta()->t_star);

  auto bad = spec;
  bad.s = 7;
  bad.d = 6;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("heavy-tailed noise has large empirical kurtosis") {
  GenSpec spec;
  spec.n = 100000;
  spec.d = 1;
  spec.s = 1;
  spec.noise.kind = NoiseKind::student_t;
  spec.noise.df = 3.0;
  spec.seed = 9;
  const auto ds = generate(spec);
  const Vector z = ds.ys() - ds.xs() * ds.meta()->t_star;
  const double mean = z.mean();
  const double m2 = (z.array() - mean).square().mean();
  const double m4 = (z.array() - mean).square().square().mean();
  CHECK(m4 / (m2 * m2) >= 3.0 + 5.0);

  CHECK(noise_moment_norm(spec.noise, 3.5) == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(noise_moment_norm(spec.noise, 2.5)));
  NoiseSpec g;
  CHECK(noise_moment_norm(g, 2.0) == doctest::Approx(1.0));
  CHECK(design_l2_l1_ratio(DesignSpec{}) == doctest::Approx(std::sqrt(std::acos(-1.0) / 2.0)));
}

TEST_CASE("baseline lasso examples") {
  GenSpec spec;
  spec.n = 100;
  spec.d = 5;
  spec.s = 2;
  spec.seed = 4;
  const auto ds = generate(spec);
  CHECK(fit_lasso_baseline(ds, 1e6).isZero());

  // lambda = 0 in one dimension is least squares
  GenSpec one = spec;
  one.d = 1;
  one.s = 1;
  const auto d1 = generate(one);
  const double ols = d1.xs().col(0).dot(d1.ys()) / d1.xs().col(0).squaredNorm();
  CHECK(fit_lasso_baseline(d1, 0.0)[0] == doctest::Approx(ols).epsilon(1e-8));

  // orthogonal design: X^T X / N = c I, solution soft-thresholds X^T y / N at lambda / 2 and scales by 1 / c
  const double c = 4.0;
  Matrix xs = Matrix::Zero(6, 3);
  for (Eigen::Index i = 0; i < 6; ++i) xs(i, i % 3) = std::sqrt(c * 6.0 / 2.0);
  const Vector ys = (Vector(6) << 3.0, -1.0, 0.2, 2.0, -2.0, 0.1).finished();
  const Dataset orth(xs, ys);
  const double lambda = 0.8;
  const Coef z = xs.transpose() * ys / 6.0;
  const Coef closed = soft_threshold(z, lambda / 2.0) / c;
  CHECK((fit_lasso_baseline(orth, lambda) - closed).norm() <= 1e-8);
}

TEST_CASE("baseline error decreases as N doubles on clean data") {
  std::vector<double> medians;
  for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
    std::vector<double> errs;
    for (std::uint64_t rep = 0; rep < 9; ++rep) {
      GenSpec spec;
      spec.n = n;
      spec.d = 20;
      spec.s = 3;
      spec.seed = 1000 * n + rep;
      const auto ds = generate(spec);
      const double lambda = 2.0 * std::sqrt(std::log(20.0) / static_cast<double>(n));
      errs.push_back(estimate_errors(fit_lasso_baseline(ds, lambda), ds.meta()->t_star).l2);
    }
    medians.push_back(median(errs));
  }
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] < medians[i - 1]);
}

TEST_CASE("estimate errors") {
  const Coef truth = (Coef(4) << 1, 0, -2, 0).finished();
  const Coef est = (Coef(4) << 1, 0.5, 0, 0).finished();
  const auto e = estimate_errors(est, truth);
  CHECK(e.l1 == doctest::Approx(2.5));
  CHECK(e.l2 == doctest::Approx(std::sqrt(4.25)));
  CHECK(e.support_precision == 0.5);
  CHECK(e.support_recall == 0.5);
  const auto z = estimate_errors(Coef::Zero(4), Coef::Zero(4));
  CHECK(z.l1 == 0.0);
  CHECK(z.support_precision == 1.0);
  CHECK(z.support_recall == 1.0);
}

TEST_CASE("results rows") {
  CHECK(results_header() ==
        "experiment_id,seed,method,n,d,s,k,lambda,outlier_count,outlier_kind,err_l1,err_l2,"
        "support_precision,support_recall,wall_time_s");
  ResultRow r;
  r.experiment_id = "x";
  r.seed = 3;
  r.method = Method::lasso_baseline;
  r.n = 10;
  r.d = 2;
  r.s = 1;
  r.k = 1;
  r.lambda = 0.5;
  r.outlier_kind = OutlierKind::response_blowup;
  const auto row = format_row(r);
  CHECK(row.substr(0, 22) == "x,3,lasso-baseline,10,");
  CHECK(row.back() == ',');
  for (auto m : {Method::mom_lasso, Method::mom_lasso_lepski, Method::lasso_baseline})
    CHECK(parse_method(to_string(m)) == m);
}

TEST_CASE("campaign replications, resume and parallelism") {
  const auto cfg = small_campaign();
  const auto p1 = scratch("one.csv");
  const auto s1 = run_campaign(cfg, p1);
  CHECK(s1.failures.empty());
  REQUIRE(s1.rows.size() == 3);
  std::set<std::uint64_t> seeds;
  for (const auto& r : s1.rows) seeds.insert(r.seed);
  CHECK(seeds.size() == 3);
  const std::string first = slurp(p1);
  CHECK(lines(first).size() == 4);
  CHECK(lines(first).front() == results_header());

  const auto again = run_campaign(cfg, p1);
  CHECK(again.rows.empty());
  CHECK(again.skipped == 3);
  CHECK(slurp(p1) == first);

  auto par = cfg;
  par.parallelism = 2;
  const auto p2 = scratch("two.csv");
  run_campaign(par, p2);
  auto a = lines(first);
  auto b = lines(slurp(p2));
  CHECK(a == b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  // a partial file is completed without repeating rows
  const auto p3 = scratch("partial.csv");
  {
    std::ofstream out(p3, std::ios::binary);
    const auto all = lines(first);
    out << all[0] << '\n' << all[1] << '\n';
  }
  const auto resumed = run_campaign(cfg, p3);
  CHECK(resumed.skipped == 1);
  CHECK(resumed.rows.size() == 2);
  CHECK(slurp(p3) == first);
}

TEST_CASE("campaign configuration from key values") {
  const auto kv = KeyValues::parse(
      "n = 100, 200\n"
      "d = 10\n"
      "s = 2\n"
      "noise = student-t\n"
      "methods = mom-lasso, lasso-baseline\n"
      "replications = 2\n"
      "seed = 9\n"
      "c_kstar = 2\n");
  const auto cfg = CampaignConfig::from_kv(kv);
  REQUIRE(cfg.specs.size() == 2);
  CHECK(cfg.specs[0].n == 100);
  CHECK(cfg.specs[1].n == 200);
  CHECK(cfg.specs[1].noise.kind == NoiseKind::student_t);
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.replications == 2);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.rates.c_kstar == 2.0);

  const auto rates = resolve_rates(cfg, cfg.specs[0]);
  CHECK(rates.n == 100);
  CHECK(rates.d == 10);
  CHECK(rates.sigma == doctest::Approx(noise_moment_norm(cfg.specs[0].noise, rates.q0)));
}

TEST_CASE("isometry diagnostic") {
  GenSpec spec;
  spec.n = 400;
  spec.d = 5;
  spec.s = 2;
  const auto ds = generate(spec);
  const TestContext ctx(ds, make_partition(400, 10), 0.0);
  const auto zero = isometry_sample(ctx, Coef::Zero(5));
  CHECK(zero.mom_distance == 0.0);
  CHECK(zero.true_l2 == 0.0);
  CHECK(zero.ratio == 1.0);

  const auto samples = diagnose_isometry(ds, 10, 25, 3);
  CHECK(samples.size() == 25);
  for (const auto& s : samples) {
    CHECK(s.true_l2 == doctest::Approx(1.0));
    CHECK(s.ratio >= 0.25);
    CHECK(s.ratio <= 85.0);
  }
  const auto again = diagnose_isometry(ds, 10, 25, 3);
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(samples[i].ratio == again[i].ratio);

  // response outliers do not touch the design, so ratios are unchanged
  auto dirty_spec = spec;
  dirty_spec.outlier_count = 20;
  dirty_spec.outliers.kind = OutlierKind::response_blowup;
  const auto dirty = diagnose_isometry(generate(dirty_spec), 10, 25, 3);
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(dirty[i].ratio == samples[i].ratio);
}
