#pragma once

#include <cstdint>

#include "latentdist/types.hpp"

namespace latentdist {

// Bandwidth search window for cross validation: log-spaced scan followed by
// golden-section refinement around the best trial point.
struct BandwidthSearch {
  double h_min = 0.0;
  double h_max = 0.0;
  std::size_t resolution = 40;
  std::size_t refine_iters = 30;
};

// Default window [0.05 s, 2 s] with s the sample std of the draws.
BandwidthSearch default_bandwidth_search(const NoisySample& sample);

// Kernel estimate of the leading bias of the ECDF at theta:
//   (1 / (2 n h^2)) sum_i sigma_i^2 ((v_i - theta)/h) phi((v_i - theta)/h).
double bias_cdf_hat(const NoisySample& sample, double theta, double h);

// ECDF minus the estimated bias over m, with the companion standard errors.
CdfEstimate corrected_cdf(const NoisySample& sample, const ThetaGrid& grid,
                          double h);

// Least-squares cross-validation objective for the bandwidth.
double cv_objective(const NoisySample& sample, double h);

// Minimizer of cv_objective over the search window.  Throws
// NoInteriorMinimum when the scan minimum sits on the window edge.
double select_bandwidth(const NoisySample& sample,
                        const BandwidthSearch& search);

struct BandwidthChoice {
  double h = 0.0;
  bool used_fallback = false;
};

// Like select_bandwidth, but falls back to h = s * m^{-1/2} (the rate the
// theory prescribes) when no interior minimum exists.
BandwidthChoice select_bandwidth_or_fallback(const NoisySample& sample,
                                             const BandwidthSearch& search);

// Rank-adjusted quantile: order statistic of rank ceil(tau_star n) with
// tau_star = tau + bias_cdf_hat(q_naive) / m, clamped to [1, n].
QuantileEstimate corrected_quantile(const NoisySample& sample, double tau,
                                    double h);

// Standard error of the corrected CDF from the per-unit influence basis
//   1{v_i <= theta} + (1/2) (1/(m h^2)) sigma_i^2 k'((v_i - theta)/h).
double se_corrected_cdf(const NoisySample& sample, double theta, double h);

// Percentile bootstrap for the corrected quantile.  Pairs (draw, variance)
// are resampled jointly; the bandwidth stays fixed across resamples.
// Replicate b uses a substream derived from (seed, b), so the result does
// not depend on evaluation order.
QuantileEstimate bootstrap_quantile_ci(const NoisySample& sample, double tau,
                                       double h, std::size_t n_boot,
                                       double level, std::uint64_t seed);

}  // namespace latentdist
