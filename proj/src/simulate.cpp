#include "momlasso/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "momlasso/error.hpp"
#include "momlasso/random.hpp"

namespace momlasso {

void GenSpec::validate() const {
  if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
  if (s > d) throw std::invalid_argument("sparsity exceeds dimension");
  if (outlier_count >= n) throw std::invalid_argument("outlier count must be below n");
  if (design.kind == DesignKind::student_t && !(design.df > 2.0)) {
    throw std::invalid_argument("student-t design needs df > 2 for unit variance");
  }
  if (noise.kind == NoiseKind::student_t && !(noise.df > 0.0)) {
    throw std::invalid_argument("student-t noise needs df > 0");
  }
  if (!(noise.scale >= 0.0)) throw std::invalid_argument("noise scale must be nonnegative");
  if (!std::isfinite(outliers.magnitude)) throw std::invalid_argument("outlier magnitude must be finite");
  if (outliers.target && static_cast<std::size_t>(outliers.target->size()) != d) {
    throw std::invalid_argument("outlier target has wrong dimension");
  }
  if (outlier_count > 0 && outliers.kind == OutlierKind::none) {
    throw std::invalid_argument("outliers requested without an outlier kind");
  }
}

std::string to_string(DesignKind k) { return k == DesignKind::gaussian ? "gaussian" : "student-t"; }
std::string to_string(NoiseKind k) { return k == NoiseKind::gaussian ? "gaussian" : "student-t"; }
std::string to_string(SignalKind k) { return k == SignalKind::sparse ? "sparse" : "near-sparse"; }
std::string to_string(Placement p) { return p == Placement::uniform ? "uniform" : "adversarial"; }
std::string to_string(OutlierKind k) {
  switch (k) {
    case OutlierKind::none: return "none";
    case OutlierKind::response_blowup: return "response-blowup";
    case OutlierKind::leverage: return "leverage";
    case OutlierKind::sign_flip: return "sign-flip";
    case OutlierKind::adversarial_cluster: return "adversarial-cluster";
  }
  return "none";
}

DesignKind parse_design_kind(const std::string& s) {
  if (s == "gaussian" || s == "gaussian-isotropic") return DesignKind::gaussian;
  if (s == "student-t") return DesignKind::student_t;
  throw ConfigError("unknown design '" + s + "'");
}
NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "student-t") return NoiseKind::student_t;
  throw ConfigError("unknown noise '" + s + "'");
}
SignalKind parse_signal_kind(const std::string& s) {
  if (s == "sparse") return SignalKind::sparse;
  if (s == "near-sparse") return SignalKind::near_sparse;
  throw ConfigError("unknown signal '" + s + "'");
}
OutlierKind parse_outlier_kind(const std::string& s) {
  for (auto k : {OutlierKind::none, OutlierKind::response_blowup, OutlierKind::leverage,
                 OutlierKind::sign_flip, OutlierKind::adversarial_cluster}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown outlier kind '" + s + "'");
}
Placement parse_placement(const std::string& s) {
  if (s == "uniform") return Placement::uniform;
  if (s == "adversarial") return Placement::adversarial;
  throw ConfigError("unknown outlier placement '" + s + "'");
}

GenSpec GenSpec::from_kv(const KeyValues& kv, GenSpec base) {
  GenSpec g = std::move(base);
  g.n = static_cast<std::size_t>(kv.get_uint("n", g.n));
  g.d = static_cast<std::size_t>(kv.get_uint("d", g.d));
  g.s = static_cast<std::size_t>(kv.get_uint("s", g.s));
  if (auto v = kv.get("design")) g.design.kind = parse_design_kind(*v);
  g.design.df = kv.get_double("design_df", g.design.df);
  if (auto v = kv.get("noise")) g.noise.kind = parse_noise_kind(*v);
  g.noise.df = kv.get_double("noise_df", g.noise.df);
  g.noise.scale = kv.get_double("noise_scale", g.noise.scale);
  g.amplitude = kv.get_double("amplitude", g.amplitude);
  if (auto v = kv.get("signal")) g.signal = parse_signal_kind(*v);
  g.outlier_count = static_cast<std::size_t>(kv.get_uint("outliers", g.outlier_count));
  if (auto v = kv.get("outlier_kind")) g.outliers.kind = parse_outlier_kind(*v);
  g.outliers.magnitude = kv.get_double("outlier_magnitude", g.outliers.magnitude);
  if (auto v = kv.get("outlier_target"); v && !trim(*v).empty()) {
    const auto t = kv.get_double_list("outlier_target");
    g.outliers.target = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
  }
  if (auto v = kv.get("outlier_placement")) g.outliers.placement = parse_placement(*v);
  g.seed = kv.get_uint("seed", g.seed);
  return g;
}

void GenSpec::to_kv(KeyValues& kv) const {
  kv.set("n", static_cast<std::int64_t>(n));
  kv.set("d", static_cast<std::int64_t>(d));
  kv.set("s", static_cast<std::int64_t>(s));
  kv.set("design", to_string(design.kind));
  kv.set("design_df", design.df);
  kv.set("noise", to_string(noise.kind));
  kv.set("noise_df", noise.df);
  kv.set("noise_scale", noise.scale);
  kv.set("amplitude", amplitude);
  kv.set("signal", to_string(signal));
  kv.set("outliers", static_cast<std::int64_t>(outlier_count));
  kv.set("outlier_kind", to_string(outliers.kind));
  kv.set("outlier_magnitude", outliers.magnitude);
  if (outliers.target) {
    std::string t;
    for (Eigen::Index j = 0; j < outliers.target->size(); ++j) {
      if (j) t += ",";
      t += format_double((*outliers.target)[j]);
    }
    kv.set("outlier_target", t);
  }
  kv.set("outlier_placement", to_string(outliers.placement));
  kv.set("seed", std::to_string(seed));
}

double noise_moment_norm(const NoiseSpec& noise, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("moment order must be positive");
  double moment;
  if (noise.kind == NoiseKind::gaussian) {
    moment = std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  } else {
    const double nu = noise.df;
    if (q >= nu) return std::numeric_limits<double>::infinity();
    moment = std::pow(nu, q / 2.0) * std::tgamma((q + 1.0) / 2.0) * std::tgamma((nu - q) / 2.0) /
             (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
  }
  return noise.scale * std::pow(moment, 1.0 / q);
}

double design_l2_l1_ratio(const DesignSpec& design) {
  if (design.kind == DesignKind::gaussian) return std::sqrt(std::numbers::pi / 2.0);
  const double nu = design.df;
  const double l1 = 2.0 * std::sqrt(nu) * std::tgamma((nu + 1.0) / 2.0) /
                    (std::sqrt(std::numbers::pi) * (nu - 1.0) * std::tgamma(nu / 2.0));
  const double l2 = std::sqrt(nu / (nu - 2.0));
  return l2 / l1;
}

Dataset generate(const GenSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto d = static_cast<Eigen::Index>(spec.d);
  // Each stream owns its distribution objects: normal_distribution caches draws.
  // Signal: s entries of +-amplitude on a random support.
  std::mt19937_64 signal_rng(derive_seed(spec.seed, {0}));
  std::vector<std::size_t> coords(spec.d);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(signal_rng() % (spec.d - i));
    std::swap(coords[i], coords[j]);
  }
  Coef t_star = Coef::Zero(d);
  for (std::size_t i = 0; i < spec.s; ++i) {
    const double sign = (signal_rng() & 1U) ? 1.0 : -1.0;
    t_star[static_cast<Eigen::Index>(coords[i])] = sign * spec.amplitude;
  }
  if (spec.signal == SignalKind::near_sparse && spec.s < spec.d) {
    // Off-support mass with l1 norm half of sigma s sqrt(log(ed/s)/N)/20.
    const double sigma = noise_moment_norm(spec.noise, 2.0);
    const double sd = static_cast<double>(std::max<std::size_t>(spec.s, 1));
    const double budget = 0.5 * sigma * sd *
                          std::sqrt(std::log(std::numbers::e * static_cast<double>(spec.d) / sd) /
                                    static_cast<double>(spec.n)) / 20.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(spec.d - spec.s);
    double total = 0.0;
    for (double& v : w) {
      v = std::abs(normal(signal_rng));
      total += v;
    }
    if (total > 0.0) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double sign = (signal_rng() & 1U) ? 1.0 : -1.0;
        t_star[static_cast<Eigen::Index>(coords[spec.s + i])] = sign * budget * w[i] / total;
      }
    }
  }

  std::mt19937_64 design_rng(derive_seed(spec.seed, {1}));
  Matrix xs(n, d);
  if (spec.design.kind == DesignKind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) xs(i, j) = normal(design_rng);
  } else {
    std::student_t_distribution<double> t(spec.design.df);
    const double unit = std::sqrt((spec.design.df - 2.0) / spec.design.df);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) xs(i, j) = unit * t(design_rng);
  }

  std::mt19937_64 noise_rng(derive_seed(spec.seed, {2}));
  Vector ys = xs * t_star;
  if (spec.noise.kind == NoiseKind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) ys[i] += spec.noise.scale * normal(noise_rng);
  } else {
    std::student_t_distribution<double> t(spec.noise.df);
    for (Eigen::Index i = 0; i < n; ++i) ys[i] += spec.noise.scale * t(noise_rng);
  }

  std::vector<bool> mask(spec.n, false);
  if (spec.outlier_count > 0) {
    std::mt19937_64 out_rng(derive_seed(spec.seed, {3}));
    std::vector<std::size_t> picked;
    if (spec.outliers.placement == Placement::uniform) {
      std::vector<std::size_t> idx(spec.n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t i = 0; i < spec.outlier_count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(out_rng() % (spec.n - i));
        std::swap(idx[i], idx[j]);
      }
      picked.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.outlier_count));
    } else {
      const std::size_t stride = spec.n / spec.outlier_count;
      for (std::size_t i = 0; i < spec.outlier_count; ++i) picked.push_back(i * stride);
    }
    std::sort(picked.begin(), picked.end());
    const Coef target = spec.outliers.target ? *spec.outliers.target : Coef(-t_star);
    for (std::size_t i : picked) {
      const auto e = static_cast<Eigen::Index>(i);
      mask[i] = true;
      switch (spec.outliers.kind) {
        case OutlierKind::response_blowup: {
          const double sign = (out_rng() & 1U) ? 1.0 : -1.0;
          ys[e] = xs.row(e).dot(t_star) + sign * spec.outliers.magnitude;
          break;
        }
        case OutlierKind::leverage:
          xs.row(e) *= spec.outliers.magnitude;
          break;
        case OutlierKind::sign_flip:
          ys[e] = -ys[e];
          break;
        case OutlierKind::adversarial_cluster:
          ys[e] = xs.row(e).dot(target);
          break;
        case OutlierKind::none:
          break;
      }
    }
  }
  return Dataset(std::move(xs), std::move(ys), GroundTruth{std::move(t_star), std::move(mask)});
}

GenSpec GenSpec::from_kv(const KeyValues& kv) { return from_kv(kv, GenSpec{}); }

}  // namespace momlasso
