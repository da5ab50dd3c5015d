#include "latentdist/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "latentdist/empirical.hpp"
#include "latentdist/rng.hpp"
#include "latentdist/special.hpp"

namespace latentdist {

namespace {

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    fail(ErrorCode::BadBandwidth, "bandwidth must be positive, got " +
                                      std::to_string(h));
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorCode::BadTau, "tau must lie in (0,1), got " + std::to_string(tau));
  }
}

double sample_std(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

BandwidthSearch default_bandwidth_search(const NoisySample& sample) {
  double s = sample_std(sample.draws());
  if (!(s > 0.0)) s = 1.0;  // degenerate sample; window is still valid
  return BandwidthSearch{0.05 * s, 2.0 * s, 40, 30};
}

double bias_cdf_hat(const NoisySample& sample, double theta, double h) {
  check_bandwidth(h);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (draws[i] - theta) / h;
    acc += vars[i] * z * normal_pdf(z);
  }
  return acc / (2.0 * static_cast<double>(n) * h * h);
}

CdfEstimate corrected_cdf(const NoisySample& sample, const ThetaGrid& grid,
                          double h) {
  check_bandwidth(h);
  CdfEstimate est;
  est.grid = grid;
  est.method = Method::analytic;
  est.f_hat = ecdf(sample, grid);
  est.bias_hat.resize(grid.size());
  est.f_corrected.resize(grid.size());
  est.se.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    est.bias_hat[k] = bias_cdf_hat(sample, grid[k], h);
    est.f_corrected[k] = est.f_hat[k] - est.bias_hat[k] / sample.m();
    est.se[k] = se_corrected_cdf(sample, grid[k], h);
  }
  return est;
}

double cv_objective(const NoisySample& sample, double h) {
  check_bandwidth(h);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  const double nn = static_cast<double>(n);
  const double m = sample.m();
  const double c_loo = nn * m / (nn - 1.0);
  const double inv_h = 1.0 / h;
  const double inv_h2 = inv_h * inv_h;
  // The Gaussian cross integral collapses to a single exponential per pair;
  // the phi at bandwidth h is the square of the one at sqrt(2) h.
  const double cross_scale = 0.25 * kInvSqrt2 * inv_h;

  double total = 0.0;
  // Diagonal of the double sum: difference zero.
  for (std::size_t i = 0; i < n; ++i) {
    total += vars[i] * vars[i] * inv_h2 * cross_scale * kInvSqrt2Pi * 0.5;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = draws[i];
    const double si = vars[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = vi - draws[j];
      const double sj = vars[j];
      const double q = d * d * inv_h2;                   // (d/h)^2
      const double t = std::exp(-0.25 * q);              // exp(-d^2/(4h^2))
      const double phi_half = kInvSqrt2Pi * t;           // phi(d/(sqrt(2) h))
      const double phi_full = kInvSqrt2Pi * t * t;       // phi(d/h)
      // Both orderings of the first double sum.
      total += 2.0 * si * sj * inv_h2 * cross_scale * phi_half *
               (0.5 - 0.25 * q);
      // Both orderings of the second sum: phi' is odd in the difference.
      total += inv_h * phi_full *
               (m * (d * inv_h) * (sj - si) - c_loo * (si + sj));
    }
  }
  return total;
}

double select_bandwidth(const NoisySample& sample,
                        const BandwidthSearch& search) {
  if (!(search.h_min > 0.0) || !(search.h_min < search.h_max) ||
      search.resolution < 8) {
    fail(ErrorCode::BadBandwidth, "invalid bandwidth search window");
  }
  const std::size_t r = search.resolution;
  const double log_lo = std::log(search.h_min);
  const double log_hi = std::log(search.h_max);
  std::vector<double> hs(r), vs(r);
  for (std::size_t k = 0; k < r; ++k) {
    hs[k] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) /
                                  static_cast<double>(r - 1));
    vs[k] = cv_objective(sample, hs[k]);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < r; ++k) {
    if (vs[k] < vs[best]) best = k;
  }
  if (best == 0 || best == r - 1) {
    fail(ErrorCode::NoInteriorMinimum,
         "cv objective minimized at window edge h = " + std::to_string(hs[best]));
  }
  // Golden-section refinement inside the bracketing interval.
  constexpr double kGolden = 0.6180339887498949;
  double a = hs[best - 1];
  double b = hs[best + 1];
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = cv_objective(sample, x1);
  double f2 = cv_objective(sample, x2);
  for (std::size_t it = 0;
       it < search.refine_iters && (b - a) > 1e-10 * (std::abs(a) + 1e-300);
       ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = cv_objective(sample, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = cv_objective(sample, x2);
    }
  }
  return 0.5 * (a + b);
}

BandwidthChoice select_bandwidth_or_fallback(const NoisySample& sample,
                                             const BandwidthSearch& search) {
  try {
    return BandwidthChoice{select_bandwidth(sample, search), false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoInteriorMinimum) throw;
    double s = sample_std(sample.draws());
    if (!(s > 0.0)) s = 1.0;
    return BandwidthChoice{s / std::sqrt(sample.m()), true};
  }
}

QuantileEstimate corrected_quantile(const NoisySample& sample, double tau,
                                    double h) {
  check_tau(tau);
  check_bandwidth(h);
  QuantileEstimate est;
  est.method = Method::analytic;
  est.tau = tau;
  est.q_naive = quantile_plugin(sample, tau);
  est.tau_star = tau + bias_cdf_hat(sample, est.q_naive, h) / sample.m();
  const double n = static_cast<double>(sample.size());
  auto rank = static_cast<long long>(std::ceil(est.tau_star * n));
  rank = std::clamp<long long>(rank, 1, static_cast<long long>(sample.size()));
  est.q_corrected = sample.sorted_draws()[static_cast<std::size_t>(rank - 1)];
  return est;
}

double se_corrected_cdf(const NoisySample& sample, double theta, double h) {
  check_bandwidth(h);
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  const std::size_t n = draws.size();
  const double scale = 0.5 / (sample.m() * h * h);
  std::vector<double> basis(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (draws[i] - theta) / h;
    basis[i] = (draws[i] <= theta ? 1.0 : 0.0) +
               scale * vars[i] * normal_pdf_deriv(z);
  }
  return sample_std(basis) / std::sqrt(static_cast<double>(n));
}

QuantileEstimate bootstrap_quantile_ci(const NoisySample& sample, double tau,
                                       double h, std::size_t n_boot,
                                       double level, std::uint64_t seed) {
  check_tau(tau);
  check_bandwidth(h);
  if (n_boot < 100) {
    fail(ErrorCode::BadParams, "need at least 100 bootstrap replicates");
  }
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::BadLevel, "level must lie in (0,1)");
  }
  QuantileEstimate est = corrected_quantile(sample, tau, h);
  const std::size_t n = sample.size();
  const auto& draws = sample.draws();
  const auto& vars = sample.noise_var();
  CounterRng root(seed);
  std::vector<double> stats(n_boot);
  std::vector<double> bd(n), bv(n);
  for (std::size_t b = 0; b < n_boot; ++b) {
    CounterRng stream = root.substream(b);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(stream.bits(i) % n);
      bd[i] = draws[idx];
      bv[i] = vars[idx];
    }
    NoisySample resample = NoisySample::validate(bd, bv, sample.m());
    stats[b] = corrected_quantile(resample, tau, h).q_corrected;
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - level;
  auto pick = [&](double p) {
    auto rank = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(n_boot)));
    rank = std::clamp<std::size_t>(rank, 1, n_boot);
    return stats[rank - 1];
  };
  est.has_ci = true;
  est.ci_lower = pick(alpha / 2.0);
  est.ci_upper = pick(1.0 - alpha / 2.0);
  return est;
}

}  // namespace latentdist
