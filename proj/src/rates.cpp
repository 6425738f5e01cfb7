#include "momlasso/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "momlasso/error.hpp"

namespace momlasso {

namespace {

constexpr double kBracketLo = 1e-12;
constexpr double kBracketHi = 1e12;
constexpr double kRelTol = 1e-9;

double clamped_log(double arg) { return std::log(std::max(arg, std::numbers::e)); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double RateConfig::effective_eps() const {
  return eps ? *eps : 3.0 / (331.0 * theta0 * theta0);
}

void RateConfig::validate() const {
  require_positive(sigma, "sigma");
  if (!(q0 > 2.0)) throw std::invalid_argument("q0 must exceed 2");
  if (!(theta0 >= 1.0)) throw std::invalid_argument("theta0 must be >= 1");
  if (!(theta_r >= 1.0)) throw std::invalid_argument("theta_r must be >= 1");
  require_positive(theta_m, "theta_m");
  require_positive(effective_eps(), "eps");
  require_positive(c_link, "c_link");
  require_positive(c_rho, "c_rho");
  require_positive(c_rho_k, "c_rho_k");
  require_positive(c_fixed_point, "c_fixed_point");
  require_positive(c_lambda, "c_lambda");
  require_positive(c_kstar, "c_kstar");
  require_positive(c_k2, "c_k2");
  require_positive(c_mom_radius, "c_mom_radius");
  require_positive(branch_ratio, "branch_ratio");
  require_positive(alpha, "alpha");
  if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
}

RateConfig RateConfig::from_kv(const KeyValues& kv, RateConfig base) {
  RateConfig c = std::move(base);
  c.sigma = kv.get_double("sigma", c.sigma);
  c.q0 = kv.get_double("q0", c.q0);
  c.theta0 = kv.get_double("theta0", c.theta0);
  c.theta_r = kv.get_double("theta_r", c.theta_r);
  c.theta_m = kv.get_double("theta_m", c.theta_m);
  if (auto e = kv.get("eps"); e && *e != "auto") c.eps = parse_double(*e, "eps");
  c.c_link = kv.get_double("c_link", c.c_link);
  c.c_rho = kv.get_double("c_rho", c.c_rho);
  c.c_rho_k = kv.get_double("c_rho_k", c.c_rho_k);
  c.c_fixed_point = kv.get_double("c_fixed_point", c.c_fixed_point);
  c.c_lambda = kv.get_double("c_lambda", c.c_lambda);
  c.c_kstar = kv.get_double("c_kstar", c.c_kstar);
  c.c_k2 = kv.get_double("c_k2", c.c_k2);
  c.c_mom_radius = kv.get_double("c_mom_radius", c.c_mom_radius);
  c.branch_ratio = kv.get_double("branch_ratio", c.branch_ratio);
  c.rho_k_sqrt_variant = kv.get_bool("rho_k_sqrt_variant", c.rho_k_sqrt_variant);
  c.alpha = kv.get_double("alpha", c.alpha);
  c.n = static_cast<std::size_t>(kv.get_uint("n", c.n));
  c.d = static_cast<std::size_t>(kv.get_uint("d", c.d));
  c.k_outliers = static_cast<std::size_t>(kv.get_uint("k_outliers", c.k_outliers));
  return c;
}

void RateConfig::to_kv(KeyValues& kv) const {
  kv.set("sigma", sigma);
  kv.set("q0", q0);
  kv.set("theta0", theta0);
  kv.set("theta_r", theta_r);
  kv.set("theta_m", theta_m);
  kv.set("eps", eps ? format_double(*eps) : std::string("auto"));
  kv.set("c_link", c_link);
  kv.set("c_rho", c_rho);
  kv.set("c_rho_k", c_rho_k);
  kv.set("c_fixed_point", c_fixed_point);
  kv.set("c_lambda", c_lambda);
  kv.set("c_kstar", c_kstar);
  kv.set("c_k2", c_k2);
  kv.set("c_mom_radius", c_mom_radius);
  kv.set("branch_ratio", branch_ratio);
  kv.set("rho_k_sqrt_variant", rho_k_sqrt_variant ? std::string("true") : std::string("false"));
  kv.set("alpha", alpha);
  kv.set("n", static_cast<std::int64_t>(n));
  kv.set("d", static_cast<std::int64_t>(d));
  kv.set("k_outliers", static_cast<std::int64_t>(k_outliers));
}

double link_r2(const RateConfig& cfg, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("link function needs rho > 0");
  const double n = static_cast<double>(cfg.n);
  const double d = static_cast<double>(cfg.d);
  const double s = cfg.sigma;
  // Both terms are nondecreasing in rho once the log is clamped at e, so the
  // max needs no extra monotone envelope.
  const double multiplier =
      rho * s * std::sqrt(clamped_log(std::numbers::e * s * d / (rho * std::sqrt(n))) / n);
  double second;
  if (n >= cfg.branch_ratio * d) {
    second = s * s * d / n;
  } else {
    second = rho * rho / n * clamped_log(d / n);
  }
  return cfg.c_link * std::max(multiplier, second);
}

double link_r_inverse(const RateConfig& cfg, double value) {
  if (value <= link_r(cfg, kBracketLo)) return 0.0;
  if (value > link_r(cfg, kBracketHi)) return std::numeric_limits<double>::infinity();
  double lo = kBracketLo, hi = kBracketHi;
  while (hi / lo - 1.0 > kRelTol) {
    const double mid = std::sqrt(lo * hi);
    if (link_r(cfg, mid) >= value) hi = mid; else lo = mid;
  }
  return hi;
}

double rho_star(const RateConfig& cfg, std::size_t s) {
  if (s < 1 || s > cfg.d) throw std::invalid_argument("sparsity must satisfy 1 <= s <= d");
  const double sd = static_cast<double>(s);
  return cfg.c_rho * cfg.sigma * sd *
         std::sqrt(std::log(std::numbers::e * static_cast<double>(cfg.d) / sd) /
                   static_cast<double>(cfg.n));
}

double rho_k_closed_form(const RateConfig& cfg, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double l = clamped_log(cfg.sigma * cfg.sigma * static_cast<double>(cfg.d) / kd);
  return cfg.c_rho_k * kd / cfg.sigma * std::sqrt(1.0 / (static_cast<double>(cfg.n) * l));
}

RhoSolution solve_rho_k(const RateConfig& cfg, std::size_t k) {
  if (k < 1 || k > cfg.n) throw std::invalid_argument("block count must satisfy 1 <= k <= n");
  const double n = static_cast<double>(cfg.n);
  const double kd = static_cast<double>(k);
  // gap(rho) >= 0 iff rho is at or beyond the fixed point.
  auto gap = [&](double rho) {
    if (cfg.rho_k_sqrt_variant) {
      const double e = cfg.effective_eps();
      const double target = cfg.c_fixed_point * 16.0 * cfg.theta_m * cfg.theta_m /
                            (e * e * cfg.alpha) * std::sqrt(kd / n);
      return link_r2(cfg, rho) - target;
    }
    return cfg.c_fixed_point * link_r2(cfg, rho) * n - kd;
  };
  const double g_lo = gap(kBracketLo);
  const double g_hi = gap(kBracketHi);
  if (g_lo > 0.0) {
    const double rho = rho_k_closed_form(cfg, k);
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw ScheduleInfeasible("rho_K closed form is not positive", "k=" + std::to_string(k));
    }
    return {rho, true};
  }
  if (g_hi < 0.0) {
    std::ostringstream diag;
    diag << "k=" << k << " gap(1e-12)=" << g_lo << " gap(1e12)=" << g_hi;
    throw ScheduleInfeasible("no rho_K root in [1e-12, 1e12]", diag.str());
  }
  // Largest rho with gap <= 0: where the floor makes gap vanish on a whole
  // interval (K = sigma^2 d) this picks its right end, which keeps rho_K
  // nondecreasing in K.
  double lo = kBracketLo, hi = kBracketHi;
  while (hi / lo - 1.0 > kRelTol) {
    const double mid = std::sqrt(lo * hi);
    if (gap(mid) > 0.0) hi = mid; else lo = mid;
  }
  return {lo, false};
}

Schedule lambda_window(const RateConfig& cfg, std::size_t k) {
  const RhoSolution sol = solve_rho_k(cfg, k);
  const double r2 = link_r2(cfg, sol.rho);
  const double ratio = r2 / sol.rho;
  const double e = cfg.effective_eps();
  Schedule s{};
  s.k = k;
  s.rho_k = sol.rho;
  s.r_rho_k = std::sqrt(r2);
  s.closed_form_rho = sol.closed_form;
  s.lambda_lo = 20.0 * e / 7.0 * ratio;
  s.lambda_hi = 10.0 / (331.0 * cfg.theta0 * cfg.theta0) * ratio;
  if (!(s.lambda_lo < s.lambda_hi)) {
    throw ConfigError("empty regularization window at k=" + std::to_string(k) +
                      ": reduce eps to at most 3/(331 theta0^2) = " +
                      format_double(3.0 / (331.0 * cfg.theta0 * cfg.theta0)));
  }
  s.lambda = cfg.c_lambda * std::sqrt(s.lambda_lo * s.lambda_hi);
  if (!(s.lambda > s.lambda_lo && s.lambda < s.lambda_hi)) {
    throw ConfigError("c_lambda = " + format_double(cfg.c_lambda) +
                      " moves lambda outside the admissible window");
  }
  return s;
}

std::size_t k_star(const RateConfig& cfg, std::size_t s) {
  const double e = cfg.effective_eps();
  const double from_outliers = 8.0 * static_cast<double>(cfg.k_outliers) / 7.0;
  const double from_rate = static_cast<double>(cfg.n) * e * e * link_r2(cfg, rho_star(cfg, s)) /
                           (336.0 * cfg.theta_m * cfg.theta_m);
  const double bound = std::ceil(cfg.c_kstar * std::max(from_outliers, from_rate));
  return std::max<std::size_t>(1, static_cast<std::size_t>(bound));
}

std::size_t k_upper(const RateConfig& cfg) {
  const double t = cfg.theta0 * cfg.theta0 * cfg.theta_r * cfg.theta_r;
  return static_cast<std::size_t>(std::floor(cfg.c_k2 * static_cast<double>(cfg.n) / (84.0 * t)));
}

double mom_radius(const RateConfig& cfg, double rho_k) {
  return cfg.c_mom_radius * 28900.0 * cfg.theta_r * cfg.theta_r * cfg.theta0 * link_r(cfg, rho_k);
}

RateConfig RateConfig::from_kv(const KeyValues& kv) { return from_kv(kv, RateConfig{}); }

}  // namespace momlasso
