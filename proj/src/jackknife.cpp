#include "latentdist/jackknife.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "latentdist/empirical.hpp"
#include "latentdist/special.hpp"

namespace latentdist {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::BadLambda, "lambda must be positive, got " +
                                   std::to_string(lambda));
  }
}

void check_split(const Panel& panel, const SplitSpec& split) {
  if (split.m1 < 2 || split.m2 < 2 ||
      split.m1 + split.m2 != panel.n_periods()) {
    fail(ErrorCode::BadSplit,
         "split (" + std::to_string(split.m1) + ", " + std::to_string(split.m2) +
             ") incompatible with m = " + std::to_string(panel.n_periods()));
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorCode::BadTau, "tau must lie in (0,1), got " + std::to_string(tau));
  }
}

double indicator_se(const NoisySample& sample, double theta) {
  const double n = static_cast<double>(sample.size());
  const double f = ecdf_at(sample, theta);
  return std::sqrt(f * (1.0 - f) * n / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

SplitSpec half_split(const Panel& panel) {
  const std::size_t m = panel.n_periods();
  const std::size_t m1 = (m + 1) / 2;
  return SplitSpec{m1, m - m1};
}

CdfEstimate split_panel_cdf(const Panel& panel, const SplitSpec& split,
                            const ThetaGrid& grid) {
  check_split(panel, split);
  const double m = static_cast<double>(panel.n_periods());
  const double m1 = static_cast<double>(split.m1);
  const double m2 = static_cast<double>(split.m2);
  NoisySample full = reduce_panel(panel);
  NoisySample first = reduce_panel_columns(panel, 0, split.m1);
  NoisySample second = reduce_panel_columns(panel, split.m1, split.m2);

  CdfEstimate est;
  est.grid = grid;
  est.method = Method::split_jackknife;
  est.f_hat = ecdf(full, grid);
  est.bias_hat.resize(grid.size());
  est.f_corrected.resize(grid.size());
  est.se.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f1 = ecdf_at(first, grid[k]);
    const double f2 = ecdf_at(second, grid[k]);
    est.bias_hat[k] = m1 * f1 + m2 * f2 - m * est.f_hat[k];
    est.f_corrected[k] = est.f_hat[k] - est.bias_hat[k] / m;
    est.se[k] = indicator_se(full, grid[k]);
  }
  return est;
}

QuantileEstimate split_panel_quantile(const Panel& panel,
                                      const SplitSpec& split, double tau) {
  check_split(panel, split);
  check_tau(tau);
  const double m = static_cast<double>(panel.n_periods());
  const double m1 = static_cast<double>(split.m1);
  const double m2 = static_cast<double>(split.m2);
  NoisySample full = reduce_panel(panel);
  NoisySample first = reduce_panel_columns(panel, 0, split.m1);
  NoisySample second = reduce_panel_columns(panel, split.m1, split.m2);

  QuantileEstimate est;
  est.method = Method::split_jackknife;
  est.tau = tau;
  est.tau_star = tau;
  est.q_naive = quantile_plugin(full, tau);
  const double q1 = quantile_plugin(first, tau);
  const double q2 = quantile_plugin(second, tau);
  const double bias = m1 * q1 + m2 * q2 - m * est.q_naive;
  est.q_corrected = est.q_naive - bias / m;
  return est;
}

double smoothed_ecdf(const NoisySample& sample, double theta, double lambda) {
  check_lambda(lambda);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const double root_m = std::sqrt(sample.m());
  double acc = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double scale = lambda * std::sqrt(vars[i]) / root_m;
    acc += normal_cdf((theta - draws[i]) / scale);
  }
  return acc / static_cast<double>(draws.size());
}

CdfEstimate lambda_cdf(const NoisySample& sample, const ThetaGrid& grid,
                       double lambda) {
  check_lambda(lambda);
  const double l2 = lambda * lambda;
  CdfEstimate est;
  est.grid = grid;
  est.method = Method::lambda_jackknife;
  est.f_hat = ecdf(sample, grid);
  est.bias_hat.resize(grid.size());
  est.f_corrected.resize(grid.size());
  est.se.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f_l = smoothed_ecdf(sample, grid[k], lambda);
    est.bias_hat[k] = sample.m() * (f_l - est.f_hat[k]) / l2;
    est.f_corrected[k] = est.f_hat[k] - est.bias_hat[k] / sample.m();
    est.se[k] = se_lambda_cdf(sample, grid[k], lambda);
  }
  return est;
}

double smoothed_quantile(const NoisySample& sample, double tau, double lambda) {
  check_tau(tau);
  check_lambda(lambda);
  const auto& sorted = sample.sorted_draws();
  double max_sd = 0.0;
  for (double v : sample.noise_var()) max_sd = std::max(max_sd, std::sqrt(v));
  const double pad = 10.0 * max_sd / std::sqrt(sample.m()) * lambda;
  double lo = sorted.front() - pad;
  double hi = sorted.back() + pad;
  // Expand the bracket geometrically at most twice before giving up.
  for (int attempt = 0;; ++attempt) {
    if (smoothed_ecdf(sample, lo, lambda) <= tau &&
        smoothed_ecdf(sample, hi, lambda) >= tau) {
      break;
    }
    if (attempt >= 2) {
      fail(ErrorCode::BracketFailure,
           "tau = " + std::to_string(tau) + " outside smoothed ECDF bracket");
    }
    const double mid = 0.5 * (lo + hi);
    const double half = (hi - lo);  // doubles the width each attempt
    lo = mid - half;
    hi = mid + half;
  }
  const double range = sorted.back() - sorted.front();
  const double tol = 1e-10 * std::max(range, pad + 1e-30);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (smoothed_ecdf(sample, mid, lambda) >= tau) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

QuantileEstimate lambda_quantile(const NoisySample& sample, double tau,
                                 double lambda) {
  check_tau(tau);
  check_lambda(lambda);
  const double l2 = lambda * lambda;
  QuantileEstimate est;
  est.method = Method::lambda_jackknife;
  est.tau = tau;
  est.tau_star = tau;
  est.q_naive = quantile_plugin(sample, tau);
  const double q_l = smoothed_quantile(sample, tau, lambda);
  est.q_corrected = ((1.0 + l2) * est.q_naive - q_l) / l2;
  return est;
}

double se_lambda_cdf(const NoisySample& sample, double theta, double lambda) {
  check_lambda(lambda);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  const double root_m = std::sqrt(sample.m());
  const double l2 = lambda * lambda;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ind = draws[i] <= theta ? 1.0 : 0.0;
    const double scale = lambda * std::sqrt(vars[i]) / root_m;
    const double smooth = normal_cdf((theta - draws[i]) / scale);
    const double basis = ind - (smooth - ind) / l2;
    sum += basis;
    sum_sq += basis * basis;
  }
  const double nn = static_cast<double>(n);
  const double var = (sum_sq - sum * sum / nn) / (nn - 1.0);
  return std::sqrt(std::max(var, 0.0) / nn);
}

}  // namespace latentdist
