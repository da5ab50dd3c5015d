#pragma once

#include "latentdist/types.hpp"

namespace latentdist {

// Two-block split of the panel's time dimension.
struct SplitSpec {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
};

// Equal halves (m1 = ceil(m/2)), the default split.
SplitSpec half_split(const Panel& panel);

// Split-panel jackknife CDF: bias estimated from re-estimated draws on the
// first m1 and last m2 columns,
//   b(theta) = m1 F_m1(theta) + m2 F_m2(theta) - m F(theta).
CdfEstimate split_panel_cdf(const Panel& panel, const SplitSpec& split,
                            const ThetaGrid& grid);

// Same construction applied to the order statistic of rank ceil(tau n).
QuantileEstimate split_panel_quantile(const Panel& panel,
                                      const SplitSpec& split, double tau);

// Gaussian-smoothed ECDF with extra noise of relative scale lambda:
//   F_lambda(theta) = n^{-1} sum_i Phi((theta - v_i) / (lambda s_i / sqrt(m))).
double smoothed_ecdf(const NoisySample& sample, double theta, double lambda);

// Noise-injection jackknife: F_dot = ((1 + l^2) F_hat - F_lambda) / l^2.
CdfEstimate lambda_cdf(const NoisySample& sample, const ThetaGrid& grid,
                       double lambda);

// Left inverse of the smoothed ECDF, found by bisection.
double smoothed_quantile(const NoisySample& sample, double tau, double lambda);

// q_dot = ((1 + l^2) q_hat - q_lambda) / l^2.
QuantileEstimate lambda_quantile(const NoisySample& sample, double tau,
                                 double lambda);

// Standard error from the per-unit basis
//   1{v_i <= theta} - (Phi(.) - 1{v_i <= theta}) / lambda^2.
double se_lambda_cdf(const NoisySample& sample, double theta, double lambda);

}  // namespace latentdist
