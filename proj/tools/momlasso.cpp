// momlasso: command-line front end for the MOM-LASSO library.
//
// Every subcommand reads an optional --config key-value file; any key can
// also be given as --key value (or --key=value), which wins over the file.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "momlasso/campaign.hpp"
#include "momlasso/dataset_io.hpp"
#include "momlasso/error.hpp"
#include "momlasso/isometry.hpp"
#include "momlasso/lepski.hpp"
#include "momlasso/rates.hpp"
#include "momlasso/simulate.hpp"
#include "momlasso/solver.hpp"

using namespace momlasso;

namespace {

std::set<std::string> keys_of(const KeyValues& kv) {
  std::set<std::string> out;
  for (const auto& [k, v] : kv.entries()) out.insert(k);
  return out;
}

std::set<std::string> rate_keys() {
  KeyValues kv;
  RateConfig{}.to_kv(kv);
  return keys_of(kv);
}

std::set<std::string> solver_keys() {
  KeyValues kv;
  SolverOptions{}.to_kv(kv);
  return keys_of(kv);
}

std::set<std::string> gen_keys() {
  KeyValues kv;
  GenSpec{}.to_kv(kv);
  auto keys = keys_of(kv);
  keys.insert("outlier_target");
  return keys;
}

// Turns leftover "--key value" / "--key=value" arguments into key-values and
// rejects keys the subcommand does not know.
KeyValues collect(const std::string& config, const std::vector<std::string>& extras,
                  const std::set<std::string>& known) {
  KeyValues kv;
  if (!config.empty()) kv = KeyValues::load(config);
  KeyValues flags;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("flag --" + key + " needs a value");
      value = extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    flags.set(key, value);
  }
  kv.merge(flags);
  for (const auto& [k, v] : kv.entries()) {
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "'");
  }
  return kv;
}

std::string join(const Coef& t) {
  std::string out;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += format_double(t[i]);
  }
  return out;
}

// Rate constants for an observed dataset: n and d come from the data.
RateConfig dataset_rates(const KeyValues& kv, const Dataset& ds) {
  RateConfig rc = RateConfig::from_kv(kv);
  rc.n = ds.n();
  rc.d = ds.d();
  rc.validate();
  return rc;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Median-of-means LASSO for sparse linear regression"};
  app.require_subcommand(1);
  std::string config;

  auto* simulate = app.add_subcommand("simulate", "Generate a dataset from a GenSpec config");
  std::string sim_out;
  simulate->add_option("--config", config, "key-value config file");
  simulate->add_option("-o,--out", sim_out, "dataset CSV (sidecar written next to it)")->required();
  simulate->allow_extras();

  auto* fit = app.add_subcommand("fit", "Fit MOM-LASSO on a dataset CSV");
  std::string data;
  std::string fit_out;
  std::optional<std::size_t> fit_k;
  std::optional<double> fit_lambda;
  std::optional<std::size_t> fit_s;
  fit->add_option("--config", config, "key-value config file");
  fit->add_option("--data", data, "dataset CSV")->required();
  fit->add_option("--k", fit_k, "number of blocks (default: k_star)");
  fit->add_option("--lambda", fit_lambda, "regularization (default: schedule for K)");
  fit->add_option("--s", fit_s, "sparsity used by the default K schedule");
  fit->add_option("-o,--out", fit_out, "report file (default stdout)");
  fit->allow_extras();

  auto* lepski = app.add_subcommand("lepski", "Adaptive fit with Lepski selection of K");
  std::string lep_out;
  std::string lep_report;
  std::optional<std::size_t> lep_s;
  std::size_t lep_grid = 6;
  std::string lep_variant = "two";
  lepski->add_option("--config", config, "key-value config file");
  lepski->add_option("--data", data, "dataset CSV")->required();
  lepski->add_option("--s", lep_s, "sparsity hint for the smallest K");
  lepski->add_option("--grid-size", lep_grid, "number of K values");
  lepski->add_option("--variant", lep_variant, "one or two")->check(CLI::IsMember({"one", "two"}));
  lepski->add_option("-o,--out", lep_out, "summary file (default stdout)");
  lepski->add_option("--report", lep_report, "per-K selection report CSV");
  lepski->allow_extras();

  auto* iso = app.add_subcommand("diagnose-isometry", "MOM distance against L2 norm on random directions");
  std::size_t iso_k = 20;
  std::size_t iso_dirs = 100;
  std::uint64_t iso_seed = 0;
  std::string iso_out;
  iso->add_option("--data", data, "dataset CSV")->required();
  iso->add_option("--k", iso_k, "number of blocks");
  iso->add_option("--directions", iso_dirs, "number of random directions");
  iso->add_option("--seed", iso_seed, "partition and direction seed");
  iso->add_option("-o,--out", iso_out, "CSV output (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run a simulation campaign");
  std::string sweep_out;
  sweep->add_option("--config", config, "campaign config file");
  sweep->add_option("-o,--out", sweep_out, "results CSV (appended, resumable)")->required();
  sweep->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      const KeyValues kv = collect(config, simulate->remaining(), gen_keys());
      const GenSpec spec = GenSpec::from_kv(kv);
      save_dataset(generate(spec), sim_out);
      return 0;
    }

    if (*fit) {
      auto known = rate_keys();
      known.merge(solver_keys());
      const KeyValues kv = collect(config, fit->remaining(), known);
      const Dataset ds = load_dataset(data);
      const RateConfig rc = dataset_rates(kv, ds);
      const SolverOptions opts = SolverOptions::from_kv(kv);
      const std::size_t k = fit_k ? *fit_k : std::min(k_star(rc, fit_s.value_or(1)), ds.n());
      double lambda = 0.0;
      double rho = 0.0;
      if (fit_lambda) {
        lambda = *fit_lambda;
      } else {
        const Schedule sched = lambda_window(rc, k);
        lambda = sched.lambda;
        rho = sched.rho_k;
      }
      FitReport rep = fit_mom_lasso(ds, k, lambda, opts);
      if (rep.certified_radius < 0.0) {
        rep.certified_radius = certify_radius(ds, k, lambda, rep.t_hat, opts.certify_probes, opts.seed);
      }
      KeyValues out;
      out.set("k", static_cast<std::int64_t>(rep.k));
      out.set("lambda", rep.lambda);
      if (!fit_lambda) out.set("rho_k", rho);
      out.set("iters", static_cast<std::int64_t>(rep.iters));
      out.set("converged", rep.converged ? std::string("true") : std::string("false"));
      out.set("restart", static_cast<std::int64_t>(rep.restart));
      out.set("certified_radius", rep.certified_radius);
      out.set("t_hat", join(rep.t_hat));
      write_text(fit_out, out.dump());
      return 0;
    }

    if (*lepski) {
      auto known = rate_keys();
      known.merge(solver_keys());
      const KeyValues kv = collect(config, lepski->remaining(), known);
      const Dataset ds = load_dataset(data);
      const RateConfig rc = dataset_rates(kv, ds);
      const SolverOptions opts = SolverOptions::from_kv(kv);
      const LepskiGrid grid = build_grid(ds, rc, lep_s, lep_grid, opts);
      const LepskiSelection sel =
          select_k(grid, lep_variant == "one" ? LepskiVariant::one : LepskiVariant::two, ds);

      std::ostringstream report;
      report << "k,rho_k,lambda,mom_radius,iters,converged,tested,passed,selected\n";
      for (std::size_t i = 0; i < grid.k_values.size(); ++i) {
        report << grid.k_values[i] << ',' << format_double(grid.schedules[i].rho_k) << ','
               << format_double(grid.schedules[i].lambda) << ',' << format_double(grid.mom_radii[i]) << ','
               << grid.fits[i].iters << ',' << (grid.fits[i].converged ? "true" : "false") << ','
               << (sel.tested[i] ? "true" : "false") << ',' << (sel.passed[i] ? "true" : "false") << ','
               << (i == sel.index ? "true" : "false") << '\n';
      }
      if (!lep_report.empty()) write_text(lep_report, report.str());

      KeyValues out;
      out.set("k_hat", static_cast<std::int64_t>(sel.k_hat));
      out.set("lambda", grid.schedules[sel.index].lambda);
      out.set("fallback", sel.fallback ? std::string("true") : std::string("false"));
      out.set("witness", sel.witness);
      out.set("f_le", join(sel.f_le));
      write_text(lep_out, out.dump());
      return 0;
    }

    if (*iso) {
      const Dataset ds = load_dataset(data);
      std::ostringstream csv;
      csv << "direction,mom_distance,true_l2,ratio\n";
      const auto samples = diagnose_isometry(ds, iso_k, iso_dirs, iso_seed);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        csv << i << ',' << format_double(samples[i].mom_distance) << ',' << format_double(samples[i].true_l2)
            << ',' << format_double(samples[i].ratio) << '\n';
      }
      write_text(iso_out, csv.str());
      return 0;
    }

    if (*sweep) {
      auto known = rate_keys();
      known.merge(solver_keys());
      known.merge(gen_keys());
      for (const char* k : {"methods", "replications", "parallelism", "record_time", "lepski_grid_size",
                            "lepski_variant", "lepski_k_outliers"}) {
        known.insert(k);
      }
      const KeyValues kv = collect(config, sweep->remaining(), known);
      const CampaignConfig cfg = CampaignConfig::from_kv(kv);
      const CampaignSummary summary = run_campaign(cfg, sweep_out);
      std::cerr << summary.rows.size() << " rows written, " << summary.skipped << " skipped, "
                << summary.failures.size() << " failed\n";
      for (const auto& f : summary.failures) std::cerr << "  " << f << '\n';
      return summary.failures.empty() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const ScheduleInfeasible& e) {
    std::cerr << "schedule infeasible: " << e.what() << '\n';
    return 3;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
