#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_io.hpp"
#include "latentdist/analytic.hpp"
#include "latentdist/empirical.hpp"
#include "latentdist/jackknife.hpp"
#include "latentdist/runner.hpp"

namespace ld = latentdist;

namespace {

constexpr std::uint64_t kDefaultSeed = 20150623;  // fixed; never time-based

constexpr int kExitUsage = 2;
constexpr int kExitEstimator = 3;
constexpr int kExitStrict = 4;

std::vector<double> parse_tau_list(const std::string& spec) {
  std::vector<double> taus;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    taus.push_back(std::stod(item));
  }
  return taus;
}

// Load either estimate-level data (theta_hat, sigma2 + --m) or a long panel
// (unit, period, value), reducing the panel to row means and s_i^2.
ld::NoisySample load_sample(const std::string& path, double m_flag,
                            bool* was_panel) {
  ld::cli::CsvTable table = ld::cli::read_csv(path);
  if (ld::cli::has_column(table, "theta_hat")) {
    const std::size_t c_draw = ld::cli::column_index(table, "theta_hat");
    const std::size_t c_var = ld::cli::column_index(table, "sigma2");
    if (!(m_flag >= 1.0)) {
      ld::fail(ld::ErrorCode::BadM, "estimate-level input requires --m >= 1");
    }
    std::vector<double> draws, vars;
    draws.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      draws.push_back(row[c_draw]);
      vars.push_back(row[c_var]);
    }
    if (was_panel) *was_panel = false;
    return ld::NoisySample::validate(std::move(draws), std::move(vars), m_flag);
  }
  const std::size_t c_unit = ld::cli::column_index(table, "unit");
  const std::size_t c_period = ld::cli::column_index(table, "period");
  const std::size_t c_value = ld::cli::column_index(table, "value");
  std::map<long long, std::map<long long, double>> cells;
  for (const auto& row : table.rows) {
    cells[std::llround(row[c_unit])][std::llround(row[c_period])] =
        row[c_value];
  }
  const std::size_t n = cells.size();
  const std::size_t m = cells.empty() ? 0 : cells.begin()->second.size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& [unit, periods] : cells) {
    if (periods.size() != m) {
      ld::fail(ld::ErrorCode::BadSpec,
               "unit " + std::to_string(unit) + " has " +
                   std::to_string(periods.size()) + " periods, expected " +
                   std::to_string(m));
    }
    for (const auto& [period, value] : periods) data.push_back(value);
  }
  if (was_panel) *was_panel = true;
  ld::Panel panel = ld::Panel::validate(std::move(data), n, m);
  try {
    return ld::reduce_panel(panel);
  } catch (const ld::Error& e) {
    if (e.code() == ld::ErrorCode::ZeroVariance) {
      // Re-map the unit index to the user's label.
      auto it = cells.begin();
      std::string msg = e.what();
      auto pos = msg.find("unit ");
      if (pos != std::string::npos) {
        std::size_t idx = std::stoul(msg.substr(pos + 5));
        std::advance(it, static_cast<long>(idx));
        ld::fail(ld::ErrorCode::ZeroVariance,
                 "unit " + std::to_string(it->first) +
                     " has constant observations");
      }
    }
    throw;
  }
}

ld::Panel load_panel(const std::string& path) {
  ld::cli::CsvTable table = ld::cli::read_csv(path);
  const std::size_t c_unit = ld::cli::column_index(table, "unit");
  const std::size_t c_period = ld::cli::column_index(table, "period");
  const std::size_t c_value = ld::cli::column_index(table, "value");
  std::map<long long, std::map<long long, double>> cells;
  for (const auto& row : table.rows) {
    cells[std::llround(row[c_unit])][std::llround(row[c_period])] =
        row[c_value];
  }
  const std::size_t n = cells.size();
  const std::size_t m = cells.empty() ? 0 : cells.begin()->second.size();
  std::vector<double> data;
  for (const auto& [unit, periods] : cells) {
    if (periods.size() != m) {
      ld::fail(ld::ErrorCode::BadSpec,
               "unit " + std::to_string(unit) + " is unbalanced");
    }
    for (const auto& [period, value] : periods) data.push_back(value);
  }
  return ld::Panel::validate(std::move(data), n, m);
}

ld::ThetaGrid make_grid(const ld::NoisySample& sample,
                        const std::string& grid_spec) {
  if (grid_spec == "auto") {
    double max_sd = 0.0;
    for (double v : sample.noise_var()) max_sd = std::max(max_sd, std::sqrt(v));
    const double pad = 3.0 * max_sd / std::sqrt(sample.m());
    const double lo = sample.sorted_draws().front() - pad;
    const double hi = sample.sorted_draws().back() + pad;
    return ld::ThetaGrid::linspace(lo, hi, 201);
  }
  // min:max:count
  std::stringstream ss(grid_spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) {
    ld::fail(ld::ErrorCode::BadGrid, "--grid expects 'auto' or min:max:count");
  }
  return ld::ThetaGrid::linspace(std::stod(parts[0]), std::stod(parts[1]),
                                 std::stoul(parts[2]));
}

void write_cdf_csv(const ld::CdfEstimate& est, bool clamp,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) ld::fail(ld::ErrorCode::BadSpec, "cannot write '" + path + "'");
  out << std::setprecision(17);
  out << "theta,f_hat,bias_hat,f_corrected,se\n";
  for (std::size_t k = 0; k < est.grid.size(); ++k) {
    double f = est.f_corrected[k];
    if (clamp) f = std::clamp(f, 0.0, 1.0);
    out << est.grid[k] << ',' << est.f_hat[k] << ',' << est.bias_hat[k] << ','
        << f << ',' << est.se[k] << '\n';
  }
}

void write_quantile_csv(const std::vector<ld::QuantileEstimate>& rows,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) ld::fail(ld::ErrorCode::BadSpec, "cannot write '" + path + "'");
  out << std::setprecision(17);
  out << "tau,q_naive,tau_star,q_corrected,ci_lower,ci_upper\n";
  for (const auto& q : rows) {
    out << q.tau << ',' << q.q_naive << ',' << q.tau_star << ','
        << q.q_corrected << ',';
    if (q.has_ci) {
      out << q.ci_lower << ',' << q.ci_upper << '\n';
    } else {
      out << ",\n";
    }
  }
}

struct EstimateArgs {
  std::string input;
  std::string out;
  std::string qout;
  std::string method = "analytic";
  std::string grid = "auto";
  std::string taus;
  double m = 0.0;
  double h = 0.0;
  bool cv = false;
  bool clamp = false;
  bool fallback = false;
  std::size_t bootstrap = 0;
  double level = 0.95;
  std::uint64_t seed = kDefaultSeed;
};

int run_estimate(const EstimateArgs& args) {
  bool was_panel = false;
  ld::NoisySample sample = load_sample(args.input, args.m, &was_panel);
  if (args.method == "split-jackknife" && !was_panel) {
    std::cerr << "error: split-jackknife needs long panel input\n";
    return kExitUsage;
  }

  double h = args.h;
  if (args.method == "analytic") {
    if (args.cv) {
      if (args.fallback) {
        h = ld::select_bandwidth_or_fallback(
                sample, ld::default_bandwidth_search(sample))
                .h;
      } else {
        h = ld::select_bandwidth(sample, ld::default_bandwidth_search(sample));
      }
    } else if (!(h > 0.0)) {
      std::cerr << "error: --method analytic needs --h or --cv\n";
      return kExitUsage;
    }
  }

  ld::ThetaGrid grid = make_grid(sample, args.grid);
  ld::CdfEstimate cdf;
  if (args.method == "naive") {
    cdf.grid = grid;
    cdf.method = ld::Method::naive;
    cdf.f_hat = ld::ecdf(sample, grid);
    cdf.bias_hat.assign(grid.size(), 0.0);
    cdf.f_corrected = cdf.f_hat;
    cdf.se.resize(grid.size());
    const double n = static_cast<double>(sample.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double f = cdf.f_hat[k];
      cdf.se[k] = std::sqrt(f * (1.0 - f) * n / (n - 1.0)) / std::sqrt(n);
    }
  } else if (args.method == "analytic") {
    cdf = ld::corrected_cdf(sample, grid, h);
  } else if (args.method == "lambda-jackknife") {
    cdf = ld::lambda_cdf(sample, grid, 1.0);
  } else if (args.method == "split-jackknife") {
    ld::Panel panel = load_panel(args.input);
    cdf = ld::split_panel_cdf(panel, ld::half_split(panel), grid);
  } else {
    std::cerr << "error: unknown method '" << args.method << "'\n";
    return kExitUsage;
  }
  if (!args.out.empty()) write_cdf_csv(cdf, args.clamp, args.out);

  if (!args.taus.empty()) {
    std::vector<ld::QuantileEstimate> rows;
    for (double tau : parse_tau_list(args.taus)) {
      ld::QuantileEstimate q;
      if (args.method == "naive") {
        q.tau = tau;
        q.tau_star = tau;
        q.q_naive = ld::quantile_plugin(sample, tau);
        q.q_corrected = q.q_naive;
      } else if (args.method == "analytic") {
        if (args.bootstrap > 0) {
          q = ld::bootstrap_quantile_ci(sample, tau, h, args.bootstrap,
                                        args.level, args.seed);
        } else {
          q = ld::corrected_quantile(sample, tau, h);
        }
      } else if (args.method == "lambda-jackknife") {
        q = ld::lambda_quantile(sample, tau, 1.0);
      } else {
        ld::Panel panel = load_panel(args.input);
        q = ld::split_panel_quantile(panel, ld::half_split(panel), tau);
      }
      rows.push_back(q);
    }
    std::string qpath = args.qout.empty()
                            ? (args.out.empty() ? "quantiles.csv"
                                                : args.out + ".quantiles.csv")
                            : args.qout;
    write_quantile_csv(rows, qpath);
  }
  return 0;
}

ld::DesignSpec design_from_json(const nlohmann::json& j, bool strict) {
  static const std::set<std::string> known = {"kind", "n",   "m",   "psi2",
                                              "sigma2", "eta", "seed"};
  if (strict) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!known.count(it.key())) {
        ld::fail(ld::ErrorCode::BadSpec,
                 "unknown design field '" + it.key() + "'");
      }
    }
  }
  ld::DesignSpec d;
  d.kind = ld::parse_design_kind(j.at("kind").get<std::string>());
  d.n = j.at("n").get<std::size_t>();
  d.m = j.at("m").get<std::size_t>();
  if (j.contains("psi2")) d.psi2 = j["psi2"].get<double>();
  if (j.contains("sigma2")) d.sigma2 = j["sigma2"].get<double>();
  if (j.contains("eta")) d.eta = j["eta"].get<double>();
  d.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : kDefaultSeed;
  d.validate();
  return d;
}

int run_simulate(const std::string& config_path, const std::string& out_prefix,
                 bool strict) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open '" << config_path << "'\n";
    return kExitUsage;
  }
  nlohmann::json cfg = nlohmann::json::parse(in, nullptr, false);
  if (cfg.is_discarded()) {
    std::cerr << "error: '" << config_path << "' is not valid JSON\n";
    return kExitUsage;
  }
  if (!cfg.contains("schema") || cfg["schema"].get<int>() != 1) {
    std::cerr << "error: config must declare \"schema\": 1\n";
    return kExitUsage;
  }
  if (strict) {
    static const std::set<std::string> known = {"schema", "designs",
                                                "estimators", "taus",
                                                "replications"};
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      if (!known.count(it.key())) {
        std::cerr << "error: unknown config field '" << it.key() << "'\n";
        return kExitUsage;
      }
    }
  }
  std::set<std::string> estimators;
  for (const auto& e : cfg.at("estimators")) {
    estimators.insert(e.get<std::string>());
  }
  std::vector<double> taus = ld::decile_taus();
  if (cfg.contains("taus")) taus = cfg["taus"].get<std::vector<double>>();
  const auto replications = cfg.at("replications").get<std::size_t>();

  std::size_t total_excluded = 0;
  std::size_t design_index = 0;
  for (const auto& dj : cfg.at("designs")) {
    ld::DesignSpec design = design_from_json(dj, strict);
    ld::McReport report =
        ld::run_experiment(design, estimators, taus, replications);
    total_excluded += report.excluded;
    ld::print_report_table(report, std::cout);
    std::cout << "\n";
    if (!out_prefix.empty()) {
      const std::string base =
          out_prefix + "_" + std::to_string(design_index);
      std::ofstream js(base + ".json");
      ld::write_report_json(report, js);
      std::ofstream cs(base + ".csv");
      ld::write_report_csv(report, cs);
    }
    ++design_index;
  }
  if (total_excluded > 0) {
    std::cerr << "warning: " << total_excluded
              << " replication(s) excluded due to errors\n";
    if (strict) return kExitStrict;
  }
  return 0;
}

int run_bandwidth(const std::string& input, double m_flag,
                  const std::string& trace_path, bool fallback) {
  ld::NoisySample sample = load_sample(input, m_flag, nullptr);
  ld::BandwidthSearch search = ld::default_bandwidth_search(sample);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) {
      ld::fail(ld::ErrorCode::BadSpec, "cannot write '" + trace_path + "'");
    }
    out << std::setprecision(17) << "h,v\n";
    const double log_lo = std::log(search.h_min);
    const double log_hi = std::log(search.h_max);
    for (std::size_t k = 0; k < search.resolution; ++k) {
      const double h =
          std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) /
                                static_cast<double>(search.resolution - 1));
      out << h << ',' << ld::cv_objective(sample, h) << '\n';
    }
  }
  double h;
  if (fallback) {
    ld::BandwidthChoice choice = ld::select_bandwidth_or_fallback(sample, search);
    h = choice.h;
    if (choice.used_fallback) {
      std::cerr << "warning: no interior CV minimum; using rate fallback\n";
    }
  } else {
    h = ld::select_bandwidth(sample, search);
  }
  std::cout << std::setprecision(17) << h << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias-corrected distribution and quantile estimation from noisy draws"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand(
      "estimate", "Estimate F and quantiles from a CSV data set");
  cmd_est->set_help_flag("--help", "Print help");  // frees -h for --h
  cmd_est->add_option("--input", est.input, "estimate-level or long panel CSV")
      ->required();
  cmd_est->add_option("--out", est.out, "output CSV for the CDF table");
  cmd_est->add_option("--qout", est.qout, "output CSV for the quantile table");
  cmd_est->add_option("--method", est.method,
                      "naive|analytic|lambda-jackknife|split-jackknife");
  cmd_est->add_option("--m", est.m, "effective per-unit sample size");
  cmd_est->add_option("--h", est.h, "fixed bandwidth");
  cmd_est->add_flag("--cv", est.cv, "select bandwidth by cross validation");
  cmd_est->add_option("--grid", est.grid, "'auto' or min:max:count");
  cmd_est->add_option("--taus", est.taus, "comma-separated quantile levels");
  cmd_est->add_option("--bootstrap", est.bootstrap, "bootstrap replicates");
  cmd_est->add_option("--level", est.level, "CI level (default 0.95)");
  cmd_est->add_option("--seed", est.seed, "bootstrap seed");
  cmd_est->add_flag("--clamp", est.clamp, "clip reported f_corrected to [0,1]");
  cmd_est->add_flag("--fallback", est.fallback,
                    "use rate-default bandwidth if CV has no interior minimum");

  std::string sim_config, sim_out;
  bool sim_strict = false;
  auto* cmd_sim = app.add_subcommand("simulate", "Run Monte Carlo experiments");
  cmd_sim->add_option("--config", sim_config, "JSON experiment config")
      ->required();
  cmd_sim->add_option("--out", sim_out, "output prefix for JSON/CSV reports");
  cmd_sim->add_flag("--strict", sim_strict,
                    "reject unknown config fields; fail on exclusions");

  std::string bw_input, bw_trace;
  double bw_m = 0.0;
  bool bw_fallback = false;
  auto* cmd_bw =
      app.add_subcommand("bandwidth", "Cross-validated bandwidth selection");
  cmd_bw->add_option("--input", bw_input, "estimate-level or long panel CSV")
      ->required();
  cmd_bw->add_option("--m", bw_m, "effective per-unit sample size");
  cmd_bw->add_option("--trace", bw_trace, "write (h, v(h)) samples to CSV");
  cmd_bw->add_flag("--fallback", bw_fallback, "rate fallback instead of error");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_sim->parsed()) return run_simulate(sim_config, sim_out, sim_strict);
    if (cmd_bw->parsed()) return run_bandwidth(bw_input, bw_m, bw_trace, bw_fallback);
  } catch (const ld::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ld::ErrorCode::NoInteriorMinimum:
      case ld::ErrorCode::BracketFailure:
      case ld::ErrorCode::BadBandwidth:
        return kExitEstimator;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
