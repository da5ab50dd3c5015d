#include "latentdist/moments.hpp"

#include <cmath>

#include "latentdist/empirical.hpp"
#include "latentdist/special.hpp"

namespace latentdist {

namespace {

double sd_over_sqrt_n(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

VarianceEstimate corrected_variance(const Panel& panel) {
  NoisySample sample = reduce_panel(panel);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  const double m = sample.m();

  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> term_hat(n), term_check(n);
  double sum_hat = 0.0, sum_check = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = (draws[i] - mean) * (draws[i] - mean);
    term_hat[i] = d2;
    term_check[i] = d2 - vars[i] / m;
    sum_hat += term_hat[i];
    sum_check += term_check[i];
  }
  VarianceEstimate est;
  // 1/n divisor: this is the normalization consistent with the per-unit
  // influence terms used for the standard errors below.
  est.psi2_hat = sum_hat / static_cast<double>(n);
  est.psi2_check = sum_check / static_cast<double>(n);
  est.se_hat = sd_over_sqrt_n(term_hat);
  est.se_check = sd_over_sqrt_n(term_check);
  return est;
}

MomentEstimate corrected_moment(const NoisySample& sample,
                                const std::function<double(double)>& phi,
                                const std::function<double(double)>& phi_dd) {
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  const double m = sample.m();
  std::vector<double> basis(n);
  double sum_phi = 0.0, sum_bias = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = phi(draws[i]);
    const double pdd = phi_dd(draws[i]);
    if (!std::isfinite(p) || !std::isfinite(pdd)) {
      fail(ErrorCode::NonFiniteTransform,
           "phi or phi'' not finite at draw " + std::to_string(i));
    }
    sum_phi += p;
    sum_bias += pdd * vars[i];
    basis[i] = p - pdd * vars[i] / (2.0 * m);
  }
  MomentEstimate est;
  est.mu_hat = sum_phi / static_cast<double>(n);
  const double b_hat = sum_bias / (2.0 * static_cast<double>(n));
  est.mu_check = est.mu_hat - b_hat / m;
  est.se = sd_over_sqrt_n(basis);
  return est;
}

double t_test_size(const std::vector<double>& estimates,
                   const std::vector<double>& ses, double true_value,
                   double level) {
  if (estimates.size() != ses.size()) {
    fail(ErrorCode::LengthMismatch, "estimates and ses differ in length");
  }
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::BadLevel, "level must lie in (0,1)");
  }
  if (estimates.empty()) {
    fail(ErrorCode::LengthMismatch, "no replications supplied");
  }
  const double crit = normal_quantile(1.0 - level / 2.0);
  std::size_t rejections = 0;
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    if (std::abs(estimates[r] - true_value) / ses[r] > crit) ++rejections;
  }
  return static_cast<double>(rejections) / static_cast<double>(estimates.size());
}

}  // namespace latentdist
