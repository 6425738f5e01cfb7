#include "momlasso/campaign.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <variant>

#include "momlasso/baseline.hpp"
#include "momlasso/error.hpp"
#include "momlasso/metrics.hpp"
#include "momlasso/random.hpp"

namespace momlasso {

std::string to_string(Method m) {
  switch (m) {
    case Method::mom_lasso: return "mom-lasso";
    case Method::mom_lasso_lepski: return "mom-lasso-lepski";
    case Method::lasso_baseline: return "lasso-baseline";
  }
  return "mom-lasso";
}

Method parse_method(const std::string& s) {
  for (auto m : {Method::mom_lasso, Method::mom_lasso_lepski, Method::lasso_baseline}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + s + "'");
}

const std::string& results_header() {
  static const std::string header =
      "experiment_id,seed,method,n,d,s,k,lambda,outlier_count,outlier_kind,err_l1,err_l2,"
      "support_precision,support_recall,wall_time_s";
  return header;
}

std::string format_row(const ResultRow& r) {
  std::string out;
  out += r.experiment_id + ',';
  out += std::to_string(r.seed) + ',';
  out += to_string(r.method) + ',';
  out += std::to_string(r.n) + ',' + std::to_string(r.d) + ',' + std::to_string(r.s) + ',';
  out += std::to_string(r.k) + ',';
  out += format_double(r.lambda) + ',';
  out += std::to_string(r.outlier_count) + ',';
  out += to_string(r.outlier_kind) + ',';
  out += format_double(r.err_l1) + ',' + format_double(r.err_l2) + ',';
  out += format_double(r.support_precision) + ',' + format_double(r.support_recall) + ',';
  if (r.wall_time_s) out += format_double(*r.wall_time_s);
  return out;
}

namespace {

// GenSpec keys that may carry a list of values in a campaign config.
const std::vector<std::string>& product_keys() {
  static const std::vector<std::string> keys = {
      "n", "d", "s", "design", "design_df", "noise", "noise_df", "noise_scale", "amplitude",
      "signal", "outliers", "outlier_kind", "outlier_magnitude", "outlier_placement"};
  return keys;
}

bool is_auto(const KeyValues& kv, const std::string& key) {
  auto v = kv.get(key);
  return !v || trim(*v) == "auto";
}

}  // namespace

CampaignConfig CampaignConfig::from_kv(const KeyValues& kv) {
  CampaignConfig c;
  std::vector<KeyValues> combos{kv};
  for (const auto& key : product_keys()) {
    const auto values = kv.get_list(key);
    if (values.size() <= 1) continue;
    std::vector<KeyValues> next;
    for (const auto& base : combos) {
      for (const auto& v : values) {
        KeyValues k = base;
        k.set(key, v);
        next.push_back(std::move(k));
      }
    }
    combos = std::move(next);
  }
  for (const auto& combo : combos) c.specs.push_back(GenSpec::from_kv(combo));

  if (kv.contains("methods")) {
    c.methods.clear();
    for (const auto& m : kv.get_list("methods")) c.methods.push_back(parse_method(m));
  }
  c.replications = static_cast<std::size_t>(kv.get_uint("replications", c.replications));
  c.base_seed = kv.get_uint("seed", c.base_seed);
  c.parallelism = static_cast<std::size_t>(kv.get_uint("parallelism", c.parallelism));
  c.record_time = kv.get_bool("record_time", c.record_time);

  // n, d and any "auto" constant are resolved per spec.
  KeyValues rate_kv = kv;
  for (const char* key : {"sigma", "theta_m", "theta0", "k_outliers", "n", "d"}) {
    if (is_auto(kv, key)) rate_kv.erase(key);
  }
  rate_kv.erase("n");
  rate_kv.erase("d");
  c.rates = RateConfig::from_kv(rate_kv);
  c.rate_auto.sigma = is_auto(kv, "sigma");
  c.rate_auto.theta_m = is_auto(kv, "theta_m");
  c.rate_auto.theta0 = is_auto(kv, "theta0");
  c.rate_auto.k_outliers = is_auto(kv, "k_outliers");

  c.solver = SolverOptions::from_kv(kv);
  c.lepski_grid_size = static_cast<std::size_t>(kv.get_uint("lepski_grid_size", c.lepski_grid_size));
  if (auto v = kv.get("lepski_variant")) {
    if (*v == "one") c.lepski_variant = LepskiVariant::one;
    else if (*v == "two") c.lepski_variant = LepskiVariant::two;
    else throw ConfigError("lepski_variant must be 'one' or 'two'");
  }
  c.lepski_k_outliers = static_cast<std::size_t>(kv.get_uint("lepski_k_outliers", c.lepski_k_outliers));
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (c.methods.empty()) throw ConfigError("no methods selected");
  return c;
}

RateConfig resolve_rates(const CampaignConfig& cfg, const GenSpec& spec) {
  RateConfig r = cfg.rates;
  r.n = spec.n;
  r.d = spec.d;
  constexpr double kFloor = 1e-12;
  if (cfg.rate_auto.sigma) {
    const double sigma = noise_moment_norm(spec.noise, r.q0);
    if (!std::isfinite(sigma)) {
      throw ConfigError("noise has no moment of order q0 = " + format_double(r.q0));
    }
    r.sigma = std::max(sigma, kFloor);
  }
  if (cfg.rate_auto.theta_m) r.theta_m = std::max(noise_moment_norm(spec.noise, 2.0), kFloor);
  if (cfg.rate_auto.theta0) r.theta0 = std::max(1.0, design_l2_l1_ratio(spec.design));
  if (cfg.rate_auto.k_outliers) r.k_outliers = spec.outlier_count;
  r.validate();
  return r;
}

ResultRow run_method(const CampaignConfig& cfg, const GenSpec& spec, const Dataset& ds, Method method) {
  const auto start = std::chrono::steady_clock::now();
  const RateConfig rates = resolve_rates(cfg, spec);
  const std::size_t s_eff = std::max<std::size_t>(spec.s, 1);

  ResultRow row;
  row.seed = spec.seed;
  row.method = method;
  row.n = spec.n;
  row.d = spec.d;
  row.s = spec.s;
  row.outlier_count = spec.outlier_count;
  row.outlier_kind = spec.outliers.kind;

  SolverOptions opts = cfg.solver;
  opts.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(method) + 1});

  Coef estimate;
  if (method == Method::mom_lasso_lepski) {
    RateConfig adaptive = rates;
    adaptive.k_outliers = cfg.lepski_k_outliers;
    const LepskiGrid grid = build_grid(ds, adaptive, spec.s, cfg.lepski_grid_size, opts);
    const LepskiSelection sel = select_k(grid, cfg.lepski_variant, ds);
    row.k = sel.k_hat;
    row.lambda = grid.schedules[sel.index].lambda;
    estimate = sel.f_le;
  } else {
    const std::size_t k = std::min(k_star(rates, s_eff), ds.n());
    const Schedule sched = lambda_window(rates, k);
    row.lambda = sched.lambda;
    if (method == Method::mom_lasso) {
      row.k = k;
      estimate = fit_mom_lasso(ds, k, sched.lambda, opts).t_hat;
    } else {
      row.k = 1;
      estimate = fit_lasso(ds, sched.lambda).t;
    }
  }

  const EstimateErrors err = estimate_errors(estimate, ds.meta()->t_star);
  row.err_l1 = err.l1;
  row.err_l2 = err.l2;
  row.support_precision = err.support_precision;
  row.support_recall = err.support_recall;
  if (cfg.record_time) {
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

namespace {

struct Task {
  std::size_t spec;
  std::size_t rep;
  Method method;
  std::string id;
};

std::set<std::string> existing_ids(const std::filesystem::path& csv) {
  std::set<std::string> ids;
  if (csv.empty() || !std::filesystem::exists(csv)) return ids;
  std::ifstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return ids;
  if (line != results_header()) throw ConfigError(csv.string() + ": results header mismatch");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ids.insert(line.substr(0, line.find(',')));
  }
  return ids;
}

}  // namespace

CampaignSummary run_campaign(const CampaignConfig& cfg, const std::filesystem::path& csv) {
  if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
  CampaignSummary summary;
  const auto done = existing_ids(csv);

  std::vector<Task> tasks;
  for (std::size_t si = 0; si < cfg.specs.size(); ++si) {
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      for (Method m : cfg.methods) {
        std::string id = "s" + std::to_string(si) + "-r" + std::to_string(rep) + "-" + to_string(m);
        if (done.count(id)) {
          ++summary.skipped;
          continue;
        }
        tasks.push_back({si, rep, m, std::move(id)});
      }
    }
  }

  std::ofstream out;
  if (!csv.empty()) {
    const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    out.open(csv, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open results file " + csv.string());
    if (fresh) out << results_header() << '\n' << std::flush;
  }

  using Outcome = std::variant<std::monostate, ResultRow, std::string>;
  std::vector<Outcome> outcomes(tasks.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto execute = [&](std::size_t i) -> Outcome {
    const Task& task = tasks[i];
    try {
      GenSpec spec = cfg.specs[task.spec];
      spec.seed = derive_seed(cfg.base_seed, {task.spec, task.rep});
      const Dataset ds = generate(spec);
      ResultRow row = run_method(cfg, spec, ds, task.method);
      row.experiment_id = task.id;
      return row;
    } catch (const std::exception& e) {
      return task.id + ": " + e.what();
    }
  };
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      Outcome o = execute(i);
      {
        std::lock_guard lock(mu);
        outcomes[i] = std::move(o);
      }
      ready.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  const std::size_t workers = std::min(cfg.parallelism, tasks.size());
  if (workers > 1) {
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Single writer: commit outcomes in task order.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Outcome o;
    if (workers > 1) {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return !std::holds_alternative<std::monostate>(outcomes[i]); });
      o = std::move(outcomes[i]);
    } else {
      o = execute(i);
    }
    if (auto* row = std::get_if<ResultRow>(&o)) {
      if (out.is_open()) {
        out << format_row(*row) + '\n' << std::flush;
        if (!out) {
          summary.failures.push_back(row->experiment_id + ": write failed");
          out.clear();
          continue;
        }
      }
      summary.rows.push_back(std::move(*row));
    } else if (auto* err = std::get_if<std::string>(&o)) {
      summary.failures.push_back(std::move(*err));
    }
  }
  return summary;
}

}  // namespace momlasso
