#include "latentdist/comparators.hpp"

#include <algorithm>
#include <cmath>

#include "latentdist/special.hpp"

namespace latentdist {

std::vector<double> parametric_shrink(const NoisySample& sample, double sigma2,
                                      double psi2, double eta) {
  if (!(sigma2 > 0.0) || !(psi2 > 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::BadParams, "need sigma2 > 0, psi2 > 0, finite eta");
  }
  const double noise = sigma2 / sample.m();
  const double factor = 1.0 - noise / (noise + psi2);
  std::vector<double> out(sample.size());
  const auto& draws = sample.draws();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = eta + factor * (draws[i] - eta);
  }
  return out;
}

double silverman_bandwidth(const NoisySample& sample) {
  const auto& draws = sample.draws();
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : draws) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (n - 1.0));
  return 1.06 * s * std::pow(n, -0.2);
}

double eb_bandwidth(const NoisySample& sample) {
  return silverman_bandwidth(sample) /
         std::sqrt(static_cast<double>(sample.m()));
}

EbEstimates empirical_bayes(const NoisySample& sample, double sigma2,
                            double h_eb) {
  if (!(h_eb > 0.0) || !std::isfinite(h_eb)) {
    fail(ErrorCode::BadBandwidth, "EB bandwidth must be positive");
  }
  if (!(sigma2 > 0.0)) {
    fail(ErrorCode::BadParams, "sigma2 must be positive");
  }
  const auto& draws = sample.draws();
  const auto& sorted = sample.sorted_draws();
  const double shift = sigma2 / sample.m();
  // Kernel mass beyond 9 bandwidths is below double precision.
  const double radius = 9.0 * h_eb;

  EbEstimates out;
  out.values.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double x = draws[i];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - radius);
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + radius);
    double density = 0.0, slope = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double z = (x - *it) / h_eb;
      const double k = normal_pdf(z);
      density += k;
      slope += -z * k;
    }
    if (density < 1e-300) {
      density = 1e-300;
      out.degenerate_units.push_back(i);
    }
    // score = p'(x)/p(x); the 1/(n h) normalizations cancel except one 1/h.
    out.values[i] = x + shift * slope / (density * h_eb);
  }
  return out;
}

}  // namespace latentdist
