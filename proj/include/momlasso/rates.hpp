#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "momlasso/kv_config.hpp"

namespace momlasso {

/// Population constants and calibration multipliers behind the l1 rate
/// schedules. Every asymptotic relation is realized with an explicit
/// multiplier (default 1).
struct RateConfig {
  double sigma = 1.0;    ///< L^{q0} norm of the noise
  double q0 = 2.5;       ///< noise moment order, > 2
  double theta0 = 1.0;   ///< L2 / L1 equivalence constant
  double theta_r = 1.0;  ///< L2(P_i) / L2(P) equivalence constant
  double theta_m = 1.0;  ///< multiplier variance constant
  std::optional<double> eps;  ///< defaults to 3 / (331 theta0^2)

  double c_link = 1.0;
  double c_rho = 1.0;
  double c_rho_k = 1.0;        ///< multiplier on the closed-form rho_K fallback
  double c_fixed_point = 1.0;  ///< c in c r^2(rho_K) N = K
  double c_lambda = 1.0;
  double c_kstar = 1.0;
  double c_k2 = 1.0;          ///< multiplier on K2 = N / (84 theta0^2 theta_r^2)
  double c_mom_radius = 1.0;  ///< multiplier on the 28900 theta_r^2 theta0 r(rho_K) radius

  /// The "N >~ d" branch of the link function is used when n >= branch_ratio * d.
  double branch_ratio = 1.0;
  /// Solve r^2(rho_K) = c [16 theta_m^2 / (eps^2 alpha)] sqrt(K/N) instead of c r^2 N = K.
  bool rho_k_sqrt_variant = false;
  double alpha = 1.0 / 21.0;

  std::size_t n = 1;
  std::size_t d = 1;
  std::size_t k_outliers = 0;

  double effective_eps() const;
  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  static RateConfig from_kv(const KeyValues& kv, RateConfig base);
  static RateConfig from_kv(const KeyValues& kv);
  void to_kv(KeyValues& kv) const;
};

/// rho_K together with a flag telling whether bisection bracketed a root or
/// the closed form had to be used.
struct RhoSolution {
  double rho;
  bool closed_form;
};

struct Schedule {
  std::size_t k;
  double rho_k;
  double r_rho_k;  ///< r(rho_K), not squared
  double lambda_lo;
  double lambda_hi;
  double lambda;
  bool closed_form_rho;
};

/// Squared link function r^2(rho) for l1 regularization. Log arguments are
/// clamped below at e.
double link_r2(const RateConfig& cfg, double rho);
inline double link_r(const RateConfig& cfg, double rho);

/// Smallest rho with r(rho) >= value (0 when r(0+) already exceeds it,
/// +inf when no rho in (0, 1e12] reaches it).
double link_r_inverse(const RateConfig& cfg, double value);

/// rho* = c_rho sigma s sqrt(log(e d / s) / N).
double rho_star(const RateConfig& cfg, std::size_t s);

/// Printed closed form (K / sigma) sqrt(1 / (N log(sigma^2 d / K))), times c_rho_k.
double rho_k_closed_form(const RateConfig& cfg, std::size_t k);

/// Solves the rho_K fixed point by monotone bisection in log-space on
/// [1e-12, 1e12] (relative tolerance 1e-9), falling back to the closed form
/// when the left end already overshoots. Throws ScheduleInfeasible when the
/// right end undershoots.
RhoSolution solve_rho_k(const RateConfig& cfg, std::size_t k);
inline double rho_k(const RateConfig& cfg, std::size_t k) { return solve_rho_k(cfg, k).rho; }

/// Admissible regularization window at block count k and its geometric
/// midpoint (times c_lambda). Throws ConfigError when the window is empty or
/// the chosen value leaves it.
Schedule lambda_window(const RateConfig& cfg, std::size_t k);

/// Smallest integer >= c_kstar max(8 K_o / 7, N eps^2 r^2(rho*) / (336 theta_m^2)), at least 1.
std::size_t k_star(const RateConfig& cfg, std::size_t s);

/// floor(c_k2 N / (84 theta0^2 theta_r^2)).
std::size_t k_upper(const RateConfig& cfg);

/// 28900 theta_r^2 theta0 r(rho_K), times c_mom_radius.
double mom_radius(const RateConfig& cfg, double rho_k);

inline double link_r(const RateConfig& cfg, double rho) {
  return std::sqrt(link_r2(cfg, rho));
}

}  // namespace momlasso
