#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "momlasso/kv_config.hpp"
#include "momlasso/lepski.hpp"
#include "momlasso/rates.hpp"
#include "momlasso/simulate.hpp"
#include "momlasso/solver.hpp"

namespace momlasso {

enum class Method { mom_lasso, mom_lasso_lepski, lasso_baseline };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// One results-CSV line.
struct ResultRow {
  std::string experiment_id;
  std::uint64_t seed = 0;
  Method method = Method::mom_lasso;
  std::size_t n = 0, d = 0, s = 0;
  std::size_t k = 0;
  double lambda = 0.0;
  std::size_t outlier_count = 0;
  OutlierKind outlier_kind = OutlierKind::none;
  double err_l1 = 0.0, err_l2 = 0.0;
  double support_precision = 0.0, support_recall = 0.0;
  std::optional<double> wall_time_s;  ///< empty column unless timing is recorded
};

/// Exact header line of the results CSV (without the trailing LF).
const std::string& results_header();
std::string format_row(const ResultRow& row);

/// Which RateConfig fields are filled from the generating spec.
struct RateAuto {
  bool sigma = true;       ///< L^{q0} norm of the noise
  bool theta_m = true;     ///< L2 norm of the noise
  bool theta0 = true;      ///< L2/L1 ratio of a design coordinate
  bool k_outliers = true;  ///< true outlier count
};

struct CampaignConfig {
  std::vector<GenSpec> specs;
  std::vector<Method> methods{Method::mom_lasso, Method::lasso_baseline};
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  std::size_t parallelism = 1;
  bool record_time = false;
  RateConfig rates;
  RateAuto rate_auto;
  SolverOptions solver;
  std::size_t lepski_grid_size = 6;
  LepskiVariant lepski_variant = LepskiVariant::two;
  std::size_t lepski_k_outliers = 0;  ///< outlier count assumed by the adaptive method

  /// GenSpec keys may hold comma-separated lists; the campaign runs their
  /// Cartesian product in key order.
  static CampaignConfig from_kv(const KeyValues& kv);
};

/// RateConfig used for a dataset generated from spec.
RateConfig resolve_rates(const CampaignConfig& cfg, const GenSpec& spec);

/// Runs one (spec, method) pair on a dataset; no I/O.
ResultRow run_method(const CampaignConfig& cfg, const GenSpec& spec, const Dataset& ds, Method method);

struct CampaignSummary {
  std::vector<ResultRow> rows;  ///< rows produced by this run, in canonical order
  std::size_t skipped = 0;      ///< tasks already present in the CSV
  std::vector<std::string> failures;
};

/// Every (spec, replication, method) task, with data seed
/// derive_seed(base_seed, {spec, replication}) shared across methods. Rows are
/// appended to csv in canonical order through a single writer regardless of
/// parallelism; ids already present are skipped. An empty path keeps rows in
/// memory only. Per-task failures are collected, not thrown.
CampaignSummary run_campaign(const CampaignConfig& cfg, const std::filesystem::path& csv);

}  // namespace momlasso
