#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "latentdist/dgp.hpp"
#include "latentdist/types.hpp"

namespace latentdist {

// One aggregated report cell.  `estimator` is the estimator tag (for example
// "F_hat" or "psi2_check"), `target` the estimand ("tau=0.2", "psi2", ...).
struct McCell {
  std::string estimator;
  std::string target;
  double truth = 0.0;
  double bias = 0.0;
  double std_dev = 0.0;
  double se_over_std = 0.0;  // NaN when the estimator carries no SE
  double size_5pct = 0.0;    // NaN when the estimator carries no SE
  double rmse = 0.0;
  double mc_se = 0.0;        // Monte Carlo standard error of the bias
};

struct McReport {
  DesignSpec design;
  std::size_t replications = 0;
  std::size_t excluded = 0;            // replications that raised an error
  std::size_t bandwidth_fallbacks = 0; // CV fell back to the rate default
  std::vector<McCell> rows;

  const McCell* find(const std::string& estimator,
                     const std::string& target) const;
};

// Estimator tags accepted by run_experiment:
//   variance, cdf_naive, cdf_analytic, cdf_split, cdf_lambda,
//   quantile_naive, quantile_analytic, quantile_split, quantile_lambda,
//   eb, shrink
//
// CDF estimators are evaluated at the noisy-draw-distribution quantiles of
// the listed taus, with the true latent cdf at those points as the null
// value for bias and size.  They additionally produce a "rmse_grid" cell
// whose rmse field is the root of the replication-mean of the average
// squared error over a 51-point grid spanning three latent standard
// deviations.  Quantile estimators target the latent quantiles directly.
// Analytic estimators re-select the bandwidth by cross validation within
// every replication.
McReport run_experiment(const DesignSpec& design,
                        const std::set<std::string>& estimators,
                        const std::vector<double>& taus,
                        std::size_t replications);

// RMSE of a CDF estimator over the decile grid of the true F.
// `estimator` is "cdf_naive" or "cdf_analytic" (or a jackknife tag).
double rmse_curve(const DesignSpec& design, const std::string& estimator,
                  const std::vector<double>& taus, std::size_t replications);

// Default decile grid 0.1 ... 0.9.
std::vector<double> decile_taus();

// Worker count: min(hardware_concurrency, NOISY_DRAWS_THREADS if set).
std::size_t worker_count();

void write_report_json(const McReport& report, std::ostream& os);
void write_report_csv(const McReport& report, std::ostream& os);
void print_report_table(const McReport& report, std::ostream& os);

}  // namespace latentdist
