#include "momlasso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "momlasso/error.hpp"
#include "momlasso/random.hpp"

namespace momlasso {

namespace {
constexpr std::size_t kExactBlocks = 32;
}  // namespace

void SolverOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(step_decay >= 0.0)) throw std::invalid_argument("step_decay must be nonnegative");
  if (certify_probes < 1) throw std::invalid_argument("certify_probes must be >= 1");
  if (!(polish_tol > 0.0)) throw std::invalid_argument("polish_tol must be positive");
}

SolverOptions SolverOptions::from_kv(const KeyValues& kv, SolverOptions base) {
  SolverOptions o = std::move(base);
  o.max_iters = static_cast<std::size_t>(kv.get_uint("max_iters", o.max_iters));
  if (auto s = kv.get("step_size")) {
    if (*s == "auto") o.step_size.reset(); else o.step_size = parse_double(*s, "step_size");
  }
  o.tol = kv.get_double("tol", o.tol);
  o.restarts = static_cast<std::size_t>(kv.get_uint("restarts", o.restarts));
  o.seed = kv.get_uint("solver_seed", o.seed);
  o.shuffle = kv.get_bool("shuffle", o.shuffle);
  o.step_decay = kv.get_double("step_decay", o.step_decay);
  o.certify_probes = static_cast<std::size_t>(kv.get_uint("certify_probes", o.certify_probes));
  o.polish_max_dim = static_cast<std::size_t>(kv.get_uint("polish_max_dim", o.polish_max_dim));
  o.polish_tol = kv.get_double("polish_tol", o.polish_tol);
  o.polish_evals = static_cast<std::size_t>(kv.get_uint("polish_evals", o.polish_evals));
  return o;
}

void SolverOptions::to_kv(KeyValues& kv) const {
  kv.set("max_iters", static_cast<std::int64_t>(max_iters));
  kv.set("step_size", step_size ? format_double(*step_size) : std::string("auto"));
  kv.set("tol", tol);
  kv.set("restarts", static_cast<std::int64_t>(restarts));
  kv.set("solver_seed", std::to_string(seed));
  kv.set("shuffle", shuffle ? std::string("true") : std::string("false"));
  kv.set("step_decay", step_decay);
  kv.set("certify_probes", static_cast<std::int64_t>(certify_probes));
  kv.set("polish_max_dim", static_cast<std::int64_t>(polish_max_dim));
  kv.set("polish_tol", polish_tol);
  kv.set("polish_evals", static_cast<std::int64_t>(polish_evals));
}

double block_lipschitz(const Dataset& ds, const BlockPartition& p, std::size_t iterations) {
  const auto d = static_cast<Eigen::Index>(ds.d());
  const auto m = static_cast<Eigen::Index>(p.block_size());
  double best = 0.0;
  Matrix xb(m, d);
  for (std::size_t j = 0; j < p.k(); ++j) {
    const auto idx = p.block(j);
    for (Eigen::Index r = 0; r < m; ++r) xb.row(r) = ds.xs().row(static_cast<Eigen::Index>(idx[r]));
    Vector v = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
    double eig = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
      Vector w = xb.transpose() * (xb * v);
      const double norm = w.norm();
      if (norm == 0.0) break;
      eig = norm;
      v = w / norm;
    }
    best = std::max(best, 2.0 * eig / static_cast<double>(m));
  }
  return best;
}

namespace {

struct SingleRun {
  Coef t;
  std::size_t iters;
  std::vector<TraceEntry> trace;
  bool converged;
};

SingleRun descend(const Dataset& ds, std::size_t k, double lambda, const SolverOptions& opts,
                  double step0, Coef t, std::uint64_t run_seed) {
  const std::size_t n = ds.n();
  BlockPartition partition = opts.shuffle ? make_partition(n, k, derive_seed(run_seed, {0}))
                                          : make_partition(n, k);
  const auto m = static_cast<Eigen::Index>(partition.block_size());
  const auto d = static_cast<Eigen::Index>(ds.d());

  SingleRun run{std::move(t), 0, {}, false};
  run.trace.reserve(opts.max_iters);
  std::vector<double> losses(n);
  std::vector<std::size_t> order(k);
  Vector grad(d);

  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    if (opts.shuffle && it > 0) partition = make_partition(n, k, derive_seed(run_seed, {it}));
    const Vector residual = ds.ys() - ds.xs() * run.t;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residual[static_cast<Eigen::Index>(i)];
      losses[i] = r * r;
    }
    const auto means = block_means(losses, partition);
    for (std::size_t j = 0; j < k; ++j) order[j] = j;
    // Lower median: position (k-1)/2 of the (mean, index) order.
    const std::size_t pos = (k - 1) / 2;
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return means[a] < means[b] || (means[a] == means[b] && a < b);
                     });
    const std::size_t block = order[pos];

    grad.setZero();
    for (std::size_t i : partition.block(block)) {
      const auto e = static_cast<Eigen::Index>(i);
      grad.noalias() -= residual[e] * ds.xs().row(e).transpose();
    }
    grad *= 2.0 / static_cast<double>(m);

    double step = step0;
    if (k > 1 && opts.step_decay > 0.0) step /= 1.0 + static_cast<double>(it) / opts.step_decay;
    Coef next = soft_threshold(run.t - step * grad, step * lambda);
    if (!next.allFinite()) throw NumericFailure("non-finite iterate in median-block descent", it);

    run.trace.push_back({means[block] + lambda * l1_norm(run.t), block});
    const double move = (next - run.t).norm();
    run.t = std::move(next);
    run.iters = it + 1;
    if (move < opts.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

// Compass search on the certified radius, started from the descent output.
// The descent stops where the median block is stationary, which in general is
// not where the radius of the beaten set is smallest.
Coef polish(const TestContext& ctx, Coef t, double& radius, const SolverOptions& opts, std::uint64_t seed) {
  const auto d = t.size();
  std::vector<Coef> dirs;
  for (Eigen::Index j = 0; j < d; ++j) {
    Coef u = Coef::Zero(d);
    u[j] = 1.0;
    dirs.push_back(u);
    dirs.push_back(-u);
  }
  if (d == 2) {
    dirs.clear();
    for (int i = 0; i < 16; ++i) {
      const double angle = std::numbers::pi * i / 8.0;
      const Coef u = (Coef(2) << std::cos(angle), std::sin(angle)).finished();
      dirs.push_back(u / u.lpNorm<1>());
    }
  }
  radius = certify_radius(ctx, t, opts.certify_probes, seed);
  double h = std::max(radius, opts.polish_tol);
  std::size_t evals = 0;
  while (h >= opts.polish_tol && radius > opts.polish_tol && evals < opts.polish_evals) {
    bool moved = false;
    for (const Coef& u : dirs) {
      Coef cand = t + h * u;
      const double r = certify_radius(ctx, cand, opts.certify_probes, seed);
      ++evals;
      if (r < radius - 1e-3 * h) {
        t = std::move(cand);
        radius = r;
        moved = true;
        break;
      }
    }
    h = moved ? std::min(2.0 * h, std::max(radius, opts.polish_tol)) : 0.5 * h;
  }
  return t;
}

}  // namespace

FitReport fit_mom_lasso(const Dataset& ds, std::size_t k, double lambda, const SolverOptions& opts,
                        const std::optional<Coef>& init) {
  opts.validate();
  if (k < 1 || k > ds.n()) throw std::invalid_argument("block count must satisfy 1 <= k <= n");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (init) require_dimension(ds, *init);

  double step0;
  if (opts.step_size) {
    step0 = *opts.step_size;
  } else {
    const BlockPartition p = opts.shuffle ? make_partition(ds.n(), k, derive_seed(opts.seed, {0, 0}))
                                          : make_partition(ds.n(), k);
    const double lip = block_lipschitz(ds, p);
    step0 = lip > 0.0 ? 1.0 / lip : 1.0;
  }

  const Coef start = init ? *init : Coef(Coef::Zero(static_cast<Eigen::Index>(ds.d())));
  std::vector<SingleRun> runs;
  runs.reserve(opts.restarts);
  runs.push_back(descend(ds, k, lambda, opts, step0, start, derive_seed(opts.seed, {1, 0})));

  FitReport report;
  report.k = k;
  report.lambda = lambda;
  std::size_t chosen = 0;
  const bool polishing = ds.d() <= opts.polish_max_dim;
  if (opts.restarts > 1 || polishing) {
    std::mt19937_64 rng(derive_seed(opts.seed, {2}));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Coef& anchor = runs.front().t;
    const double scale = 0.1 * (1.0 + (anchor.size() ? anchor.cwiseAbs().maxCoeff() : 0.0));
    for (std::size_t r = 1; r < opts.restarts; ++r) {
      Coef t0 = anchor;
      for (Eigen::Index j = 0; j < t0.size(); ++j) t0[j] += scale * normal(rng);
      runs.push_back(descend(ds, k, lambda, opts, step0, std::move(t0), derive_seed(opts.seed, {1, r})));
    }
    const TestContext ctx(ds,
                          opts.shuffle ? make_partition(ds.n(), k, derive_seed(opts.seed, {3}))
                                       : make_partition(ds.n(), k),
                          lambda);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      double radius = 0.0;
      if (polishing) {
        runs[r].t = polish(ctx, runs[r].t, radius, opts, derive_seed(opts.seed, {4}));
      } else {
        radius = certify_radius(ctx, runs[r].t, opts.certify_probes, derive_seed(opts.seed, {4}));
      }
      if (radius < best) {
        best = radius;
        chosen = r;
      }
    }
    report.certified_radius = best;
  }
  SingleRun& win = runs[chosen];
  report.t_hat = std::move(win.t);
  report.iters = win.iters;
  report.trace = std::move(win.trace);
  report.converged = win.converged;
  report.restart = chosen;
  return report;
}

namespace {

Coef probe_direction(std::size_t d, std::size_t probe, std::uint64_t seed) {
  Coef u = Coef::Zero(static_cast<Eigen::Index>(d));
  if (d == 1) {
    u[0] = probe % 2 == 0 ? 1.0 : -1.0;
    return u;
  }
  std::mt19937_64 rng(derive_seed(seed, {probe}));
  if (d == 2) {
    std::mt19937_64 base(seed);
    const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(base);
    const double frac = std::fmod(offset + static_cast<double>(probe) * std::numbers::phi, 1.0);
    const double angle = 2.0 * std::numbers::pi * frac;
    u[0] = std::cos(angle);
    u[1] = std::sin(angle);
    return u / u.lpNorm<1>();
  }
  const std::size_t max_support = std::min<std::size_t>(d, 5);
  const std::size_t support = 1 + static_cast<std::size_t>(rng() % max_support);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t placed = 0; placed < support;) {
    const auto j = static_cast<Eigen::Index>(rng() % d);
    if (u[j] != 0.0) continue;
    double v = normal(rng);
    if (v == 0.0) v = 1.0;
    u[j] = v;
    ++placed;
  }
  return u / u.lpNorm<1>();
}

// Exact version of the ray search for few blocks. Between consecutive
// crossings of two block curves or sign changes of a coordinate of t + c u,
// the median blocks and the penalty are fixed, so T is one quadratic in c.
double exact_extent(const std::vector<double>& a, const std::vector<double>& b, const Coef& t,
                    const Coef& u, double lambda, double upper) {
  const std::size_t k = a.size();
  std::vector<double> cuts{0.0, upper};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (b[i] == b[j]) continue;
      const double c = 2.0 * (a[i] - a[j]) / (b[i] - b[j]);
      if (c > 0.0 && c < upper) cuts.push_back(c);
    }
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (u[i] == 0.0) continue;
    const double c = -t[i] / u[i];
    if (c > 0.0 && c < upper) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double t_norm = l1_norm(t);
  const std::size_t lo_pos = (k + 1) / 2 - 1;
  const std::size_t hi_pos = k - (k + 1) / 2;
  std::vector<std::size_t> order(k);
  for (std::size_t seg = cuts.size() - 1; seg >= 1; --seg) {
    const double left = cuts[seg - 1];
    const double right = cuts[seg];
    const double mid = 0.5 * (left + right);
    for (std::size_t j = 0; j < k; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return 2.0 * mid * a[x] - mid * mid * b[x] < 2.0 * mid * a[y] - mid * mid * b[y];
    });
    const std::size_t p = order[lo_pos];
    const std::size_t q = order[hi_pos];
    // T(c) = qa c^2 + qb c + qc on this segment.
    double qa = -0.5 * (b[p] + b[q]);
    double qb = a[p] + a[q];
    double qc = lambda * t_norm;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double sgn = t[i] + mid * u[i] >= 0.0 ? 1.0 : -1.0;
      qb -= lambda * sgn * u[i];
      qc -= lambda * sgn * t[i];
    }
    auto value = [&](double c) { return (qa * c + qb) * c + qc; };
    if (value(right) >= 0.0) return right;
    // Largest root inside [left, right].
    double best = -1.0;
    if (qa == 0.0) {
      if (qb != 0.0) best = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double r1 = (-qb - sq) / (2.0 * qa);
        const double r2 = (-qb + sq) / (2.0 * qa);
        for (double r : {r1, r2}) {
          if (r >= left && r <= right) best = std::max(best, r);
        }
        if (best < 0.0 && value(left) >= 0.0) best = left;
      }
    }
    if (best >= left && best <= right) return best;
    if (value(left) >= 0.0) return left;
  }
  return 0.0;
}

}  // namespace

double beaten_extent(const TestContext& ctx, const Coef& t, const Coef& u) {
  const Dataset& ds = ctx.dataset();
  require_dimension(ds, t);
  require_dimension(ds, u);
  const BlockPartition& p = ctx.partition();
  const double lambda = ctx.lambda();
  const std::size_t k = p.k();

  // Along g = t + c u the per-sample loss difference is 2c z r - c^2 z^2 with
  // z = <x, u> and r the residual of t, so each block mean is 2c a_j - c^2 b_j.
  const Vector z = ds.xs() * u;
  const Vector r = ds.ys() - ds.xs() * t;
  std::vector<double> zr(ds.n()), zz(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    zr[i] = z[e] * r[e];
    zz[i] = z[e] * z[e];
  }
  const auto a = block_means(zr, p);
  const auto b = block_means(zz, p);
  const double t_norm = l1_norm(t);
  const double u_norm = l1_norm(u);

  // Same midpoint convention as midpoint_median, without allocating.
  std::vector<double> values(k);
  const std::size_t lo_pos = (k + 1) / 2 - 1;
  const auto lo_it = values.begin() + static_cast<std::ptrdiff_t>(lo_pos);
  auto stat = [&](double c) {
    for (std::size_t j = 0; j < k; ++j) values[j] = 2.0 * c * a[j] - c * c * b[j];
    std::nth_element(values.begin(), lo_it, values.end());
    const double lo_v = *lo_it;
    const double hi_v = k % 2 == 0 ? *std::min_element(lo_it + 1, values.end()) : lo_v;
    double moved = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) moved += std::abs(t[i] + c * u[i]);
    return QuantileInterval{lo_v, hi_v, 0.5}.midpoint() + lambda * (t_norm - moved);
  };

  // T >= 0 forces at least ceil(k/2) blocks with 2 a_j - c b_j >= -lambda |u|_1.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> caps(k);
  double finite_max = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double num = 2.0 * a[j] + lambda * u_norm;
    if (b[j] > 0.0) {
      caps[j] = num / b[j];
      finite_max = std::max(finite_max, caps[j]);
    } else {
      caps[j] = num >= 0.0 ? inf : -inf;
    }
  }
  const std::size_t need = (k + 1) / 2;
  std::nth_element(caps.begin(), caps.begin() + static_cast<std::ptrdiff_t>(need - 1), caps.end(),
                   std::greater<>());
  double upper = caps[need - 1];
  if (upper <= 0.0) return 0.0;
  if (std::isinf(upper)) {
    upper = 1e3 * (1.0 + t_norm + finite_max);
    if (stat(upper) >= 0.0) return inf;
  }

  if (k <= kExactBlocks) return exact_extent(a, b, t, u, lambda, upper);

  constexpr std::size_t kScan = 512;
  double lo = 0.0;
  double hi = upper;
  for (std::size_t j = kScan; j >= 1; --j) {
    const double c = upper * static_cast<double>(j) / static_cast<double>(kScan);
    if (stat(c) >= 0.0) {
      lo = c;
      hi = j == kScan ? c : upper * static_cast<double>(j + 1) / static_cast<double>(kScan);
      break;
    }
    hi = c;
  }
  if (lo == hi) return lo;
  for (int it = 0; it < 60 && hi - lo > 1e-13 * upper; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (stat(mid) >= 0.0) lo = mid; else hi = mid;
  }
  return lo;
}

double certify_radius(const TestContext& ctx, const Coef& t, std::size_t probes, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("probes must be >= 1");
  double best = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const Coef u = probe_direction(ctx.dataset().d(), i, seed);
    best = std::max(best, beaten_extent(ctx, t, u) * l1_norm(u));
  }
  return best;
}

double certify_radius(const Dataset& ds, std::size_t k, double lambda, const Coef& t,
                      std::size_t probes, std::uint64_t seed) {
  const TestContext ctx(ds, make_partition(ds.n(), k), lambda);
  return certify_radius(ctx, t, probes, seed);
}

SolverOptions SolverOptions::from_kv(const KeyValues& kv) { return from_kv(kv, SolverOptions{}); }

}  // namespace momlasso
