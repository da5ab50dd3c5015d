#include "latentdist/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "latentdist/analytic.hpp"
#include "latentdist/comparators.hpp"
#include "latentdist/empirical.hpp"
#include "latentdist/jackknife.hpp"
#include "latentdist/moments.hpp"

namespace latentdist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Series {
  std::string estimator;
  std::string target;
  double truth = 0.0;
  bool has_se = false;
  std::vector<double> est;
  std::vector<double> se;
};

std::string tau_label(double tau) {
  std::ostringstream os;
  os << "tau=" << std::setprecision(6) << tau;
  return os.str();
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

McCell summarize(const Series& s, const std::vector<char>& excluded) {
  McCell cell;
  cell.estimator = s.estimator;
  cell.target = s.target;
  cell.truth = s.truth;
  double sum = 0.0, count = 0.0;
  for (std::size_t r = 0; r < s.est.size(); ++r) {
    if (excluded[r]) continue;
    sum += s.est[r];
    count += 1.0;
  }
  const double mean = sum / count;
  double ss = 0.0, mse = 0.0, se_sum = 0.0;
  for (std::size_t r = 0; r < s.est.size(); ++r) {
    if (excluded[r]) continue;
    const double d = s.est[r] - mean;
    ss += d * d;
    const double e = s.est[r] - s.truth;
    mse += e * e;
    if (s.has_se) se_sum += s.se[r];
  }
  cell.bias = mean - s.truth;
  cell.std_dev = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  cell.rmse = std::sqrt(mse / count);
  cell.mc_se = count > 1.0 ? cell.std_dev / std::sqrt(count) : kNaN;
  if (s.has_se) {
    cell.se_over_std = (se_sum / count) / cell.std_dev;
    std::vector<double> est_v, se_v;
    est_v.reserve(static_cast<std::size_t>(count));
    se_v.reserve(static_cast<std::size_t>(count));
    for (std::size_t r = 0; r < s.est.size(); ++r) {
      if (excluded[r]) continue;
      est_v.push_back(s.est[r]);
      se_v.push_back(s.se[r]);
    }
    cell.size_5pct = t_test_size(est_v, se_v, s.truth, 0.05);
  } else {
    cell.se_over_std = kNaN;
    cell.size_5pct = kNaN;
  }
  return cell;
}

double sample_variance(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

}  // namespace

const McCell* McReport::find(const std::string& estimator,
                             const std::string& target) const {
  for (const auto& row : rows) {
    if (row.estimator == estimator && row.target == target) return &row;
  }
  return nullptr;
}

std::vector<double> decile_taus() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("NOISY_DRAWS_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

McReport run_experiment(const DesignSpec& design,
                        const std::set<std::string>& estimators,
                        const std::vector<double>& taus,
                        std::size_t replications) {
  design.validate();
  if (replications < 100) {
    fail(ErrorCode::BadParams, "need at least 100 replications");
  }
  const bool is_panel = design.kind != DesignKind::binomial;
  for (const auto& tag : estimators) {
    static const std::set<std::string> known = {
        "variance",       "cdf_naive",       "cdf_analytic", "cdf_split",
        "cdf_lambda",     "quantile_naive",  "quantile_analytic",
        "quantile_split", "quantile_lambda", "eb",           "shrink"};
    if (!known.count(tag)) {
      fail(ErrorCode::BadSpec, "unknown estimator tag '" + tag + "'");
    }
    if (!is_panel &&
        (tag == "variance" || tag == "cdf_split" || tag == "quantile_split" ||
         tag == "eb" || tag == "shrink")) {
      fail(ErrorCode::BadSpec, "estimator '" + tag +
                                   "' requires a panel design");
    }
  }
  const bool want_h = estimators.count("cdf_analytic") ||
                      estimators.count("quantile_analytic");

  const std::size_t R = replications;
  std::vector<Series> series;
  auto add = [&](std::string est, std::string target, double truth,
                 bool has_se) {
    Series s;
    s.estimator = std::move(est);
    s.target = std::move(target);
    s.truth = truth;
    s.has_se = has_se;
    s.est.assign(R, kNaN);
    if (has_se) s.se.assign(R, kNaN);
    series.push_back(std::move(s));
    return series.size() - 1;
  };

  // Size/bias cells for the distribution-function estimators are evaluated
  // at the quantiles of the noisy-draw distribution; the null value there is
  // the true latent cdf.  The RMSE cell averages squared error over a fixed
  // grid spanning three latent standard deviations.
  const bool want_cdf =
      estimators.count("cdf_naive") || estimators.count("cdf_analytic") ||
      estimators.count("cdf_split") || estimators.count("cdf_lambda");
  std::vector<double> cdf_points;
  ThetaGrid mse_grid;
  if (want_cdf) {
    cdf_points = noisy_quantiles(design, taus);
    if (design.kind == DesignKind::binomial) {
      mse_grid = ThetaGrid::linspace(0.0, 1.0, 51);
    } else {
      const double psi = std::sqrt(design.psi2);
      mse_grid = ThetaGrid::linspace(design.eta - 3.0 * psi,
                                     design.eta + 3.0 * psi, 51);
    }
  }

  struct CdfTag {
    std::string tag;       // run_experiment tag
    std::string name;      // cell name
    std::vector<std::size_t> at_tau;
    std::size_t mse = 0;
  };
  std::vector<CdfTag> cdf_tags;
  for (auto [tag, name] : std::initializer_list<std::pair<const char*, const char*>>{
           {"cdf_naive", "F_hat"},
           {"cdf_analytic", "F_check"},
           {"cdf_split", "F_tilde"},
           {"cdf_lambda", "F_dot"}}) {
    if (!estimators.count(tag)) continue;
    CdfTag ct;
    ct.tag = tag;
    ct.name = name;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      ct.at_tau.push_back(add(name, tau_label(taus[k]),
                              true_cdf(design, cdf_points[k]), true));
    }
    ct.mse = add(name, "rmse_grid", 0.0, false);
    cdf_tags.push_back(std::move(ct));
  }

  struct QTag {
    std::string tag;
    std::string name;
    std::vector<std::size_t> at_tau;
  };
  std::vector<QTag> q_tags;
  for (auto [tag, name] : std::initializer_list<std::pair<const char*, const char*>>{
           {"quantile_naive", "q_hat"},
           {"quantile_analytic", "q_check"},
           {"quantile_split", "q_tilde"},
           {"quantile_lambda", "q_dot"}}) {
    if (!estimators.count(tag)) continue;
    QTag qt;
    qt.tag = tag;
    qt.name = name;
    for (double tau : taus) {
      qt.at_tau.push_back(
          add(name, tau_label(tau), true_quantile(design, tau), false));
    }
    q_tags.push_back(std::move(qt));
  }

  std::size_t var_hat = 0, var_check = 0, eb_mse = 0, plugin_mse = 0,
              shrink_var = 0;
  if (estimators.count("variance")) {
    var_hat = add("psi2_hat", "psi2", design.psi2, true);
    var_check = add("psi2_check", "psi2", design.psi2, true);
  }
  if (estimators.count("eb")) {
    eb_mse = add("eb", "theta_mse", 0.0, false);
    plugin_mse = add("plugin", "theta_mse", 0.0, false);
  }
  if (estimators.count("shrink")) {
    shrink_var = add("shrink_var", "psi2", design.psi2, false);
  }

  std::vector<double> mse_truth;
  if (want_cdf) {
    mse_truth.reserve(mse_grid.points().size());
    for (double theta : mse_grid.points()) {
      mse_truth.push_back(true_cdf(design, theta));
    }
  }

  std::vector<char> excluded(R, 0);
  std::vector<char> fallback(R, 0);

  auto body = [&](std::size_t rep) {
    try {
      SampleDraw draw;
      Panel panel;
      if (design.kind == DesignKind::normal) {
        PanelDraw pd = gen_normal(design, rep);
        panel = pd.panel;
        draw.sample = reduce_panel(panel);
        draw.thetas = std::move(pd.thetas);
      } else if (design.kind == DesignKind::skew_normal) {
        PanelDraw pd = gen_skew_normal(design, rep);
        panel = pd.panel;
        draw.sample = reduce_panel(panel);
        draw.thetas = std::move(pd.thetas);
      } else {
        draw = gen_binomial(design, rep);
      }
      const NoisySample& sample = draw.sample;

      double h = 0.0;
      if (want_h) {
        BandwidthChoice choice =
            select_bandwidth_or_fallback(sample, default_bandwidth_search(sample));
        h = choice.h;
        if (choice.used_fallback) fallback[rep] = 1;
      }

      SplitSpec split;
      if (estimators.count("cdf_split") || estimators.count("quantile_split")) {
        split = half_split(panel);
      }

      for (const auto& ct : cdf_tags) {
        auto value_se_at = [&](double theta) -> std::pair<double, double> {
          if (ct.tag == "cdf_naive") {
            const double value = ecdf_at(sample, theta);
            const double n = static_cast<double>(sample.size());
            const double se =
                std::sqrt(value * (1.0 - value) * n / (n - 1.0)) / std::sqrt(n);
            return {value, se};
          }
          if (ct.tag == "cdf_analytic") {
            const double value = ecdf_at(sample, theta) -
                                 bias_cdf_hat(sample, theta, h) / sample.m();
            return {value, se_corrected_cdf(sample, theta, h)};
          }
          if (ct.tag == "cdf_split") {
            ThetaGrid g = ThetaGrid::validate({theta});
            CdfEstimate est = split_panel_cdf(panel, split, g);
            return {est.f_corrected[0], est.se[0]};
          }
          const double naive = ecdf_at(sample, theta);  // cdf_lambda
          const double value =
              naive - (smoothed_ecdf(sample, theta, 1.0) - naive);
          return {value, se_lambda_cdf(sample, theta, 1.0)};
        };
        for (std::size_t k = 0; k < taus.size(); ++k) {
          const auto [value, se] = value_se_at(cdf_points[k]);
          series[ct.at_tau[k]].est[rep] = value;
          series[ct.at_tau[k]].se[rep] = se;
        }
        double mse_acc = 0.0;
        for (std::size_t j = 0; j < mse_grid.points().size(); ++j) {
          const auto [value, se] = value_se_at(mse_grid.points()[j]);
          (void)se;
          const double err = value - mse_truth[j];
          mse_acc += err * err;
        }
        series[ct.mse].est[rep] =
            mse_acc / static_cast<double>(mse_grid.points().size());
      }

      for (const auto& qt : q_tags) {
        for (std::size_t k = 0; k < taus.size(); ++k) {
          double value = 0.0;
          if (qt.tag == "quantile_naive") {
            value = quantile_plugin(sample, taus[k]);
          } else if (qt.tag == "quantile_analytic") {
            value = corrected_quantile(sample, taus[k], h).q_corrected;
          } else if (qt.tag == "quantile_split") {
            value = split_panel_quantile(panel, split, taus[k]).q_corrected;
          } else {  // quantile_lambda
            value = lambda_quantile(sample, taus[k], 1.0).q_corrected;
          }
          series[qt.at_tau[k]].est[rep] = value;
        }
      }

      if (estimators.count("variance")) {
        VarianceEstimate ve = corrected_variance(panel);
        series[var_hat].est[rep] = ve.psi2_hat;
        series[var_hat].se[rep] = ve.se_hat;
        series[var_check].est[rep] = ve.psi2_check;
        series[var_check].se[rep] = ve.se_check;
      }

      if (estimators.count("eb")) {
        double s2_sum = 0.0;
        for (double v : sample.noise_var()) s2_sum += v;
        const double sigma2 = s2_sum / static_cast<double>(sample.size());
        EbEstimates eb =
            empirical_bayes(sample, sigma2, eb_bandwidth(sample));
        double eb_acc = 0.0, plug_acc = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
          const double de = eb.values[i] - draw.thetas[i];
          const double dp = sample.draws()[i] - draw.thetas[i];
          eb_acc += de * de;
          plug_acc += dp * dp;
        }
        const double n = static_cast<double>(sample.size());
        series[eb_mse].est[rep] = eb_acc / n;
        series[plugin_mse].est[rep] = plug_acc / n;
      }

      if (estimators.count("shrink")) {
        std::vector<double> shrunk = parametric_shrink(
            sample, design.sigma2, design.psi2, design.eta);
        series[shrink_var].est[rep] = sample_variance(shrunk);
      }
    } catch (const std::exception&) {
      excluded[rep] = 1;
    }
  };

  parallel_for(R, worker_count(), body);

  McReport report;
  report.design = design;
  report.replications = R;
  for (char e : excluded) report.excluded += e;
  for (char f : fallback) report.bandwidth_fallbacks += f;
  if (report.excluded == R) {
    fail(ErrorCode::BadSpec, "every replication failed");
  }
  report.rows.reserve(series.size());
  for (const auto& s : series) {
    McCell cell = summarize(s, excluded);
    if (cell.target == "rmse_grid" || cell.target == "theta_mse") {
      // `bias` carries the mean per-replication MSE; surface its root.
      cell.rmse = std::sqrt(cell.bias);
    }
    report.rows.push_back(std::move(cell));
  }
  return report;
}

double rmse_curve(const DesignSpec& design, const std::string& estimator,
                  const std::vector<double>& taus, std::size_t replications) {
  McReport report = run_experiment(design, {estimator}, taus, replications);
  for (const auto& row : report.rows) {
    if (row.target == "rmse_grid") return row.rmse;
  }
  fail(ErrorCode::BadSpec, "estimator '" + estimator + "' produced no curve");
}

void write_report_json(const McReport& report, std::ostream& os) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["design"] = {
      {"kind", design_kind_name(report.design.kind)},
      {"n", report.design.n},
      {"m", report.design.m},
      {"psi2", report.design.psi2},
      {"sigma2", report.design.sigma2},
      {"eta", report.design.eta},
      {"seed", report.design.seed},
  };
  j["replications"] = report.replications;
  j["excluded"] = report.excluded;
  j["bandwidth_fallbacks"] = report.bandwidth_fallbacks;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["estimator"] = row.estimator;
    r["target"] = row.target;
    r["truth"] = row.truth;
    r["bias"] = row.bias;
    r["std"] = row.std_dev;
    if (std::isfinite(row.se_over_std)) r["se_over_std"] = row.se_over_std;
    if (std::isfinite(row.size_5pct)) r["size_5pct"] = row.size_5pct;
    r["rmse"] = row.rmse;
    r["mc_se"] = row.mc_se;
    j["rows"].push_back(std::move(r));
  }
  os << j.dump(2) << "\n";
}

void write_report_csv(const McReport& report, std::ostream& os) {
  os << "kind,n,m,psi2,sigma2,eta,seed,replications,excluded,"
        "estimator,target,truth,bias,std,se_over_std,size_5pct,rmse,mc_se\n";
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& row : report.rows) {
    line.str("");
    line << design_kind_name(report.design.kind) << ',' << report.design.n
         << ',' << report.design.m << ',' << report.design.psi2 << ','
         << report.design.sigma2 << ',' << report.design.eta << ','
         << report.design.seed << ',' << report.replications << ','
         << report.excluded << ',' << row.estimator << ',' << row.target << ','
         << row.truth << ',' << row.bias << ',' << row.std_dev << ','
         << row.se_over_std << ',' << row.size_5pct << ',' << row.rmse << ','
         << row.mc_se << '\n';
    os << line.str();
  }
}

void print_report_table(const McReport& report, std::ostream& os) {
  os << design_kind_name(report.design.kind) << " design, n=" << report.design.n
     << " m=" << report.design.m << ", R=" << report.replications;
  if (report.excluded > 0) os << " (excluded " << report.excluded << ")";
  os << "\n";
  os << std::left << std::setw(12) << "estimator" << std::setw(14) << "target"
     << std::right << std::setw(10) << "bias" << std::setw(10) << "std"
     << std::setw(10) << "se/std" << std::setw(10) << "size5%" << std::setw(10)
     << "rmse" << "\n";
  for (const auto& row : report.rows) {
    os << std::left << std::setw(12) << row.estimator << std::setw(14)
       << row.target << std::right << std::fixed << std::setprecision(4)
       << std::setw(10) << row.bias << std::setw(10) << row.std_dev;
    if (std::isfinite(row.se_over_std)) {
      os << std::setw(10) << row.se_over_std;
    } else {
      os << std::setw(10) << "-";
    }
    if (std::isfinite(row.size_5pct)) {
      os << std::setw(10) << row.size_5pct;
    } else {
      os << std::setw(10) << "-";
    }
    os << std::setw(10) << row.rmse << "\n";
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
}

}  // namespace latentdist
