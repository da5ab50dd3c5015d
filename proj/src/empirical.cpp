#include "latentdist/empirical.hpp"

#include <algorithm>
#include <cmath>

namespace latentdist {

double ecdf_at(const NoisySample& sample, double theta) {
  const auto& sorted = sample.sorted_draws();
  auto it = std::upper_bound(sorted.begin(), sorted.end(), theta);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

std::vector<double> ecdf(const NoisySample& sample, const ThetaGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = ecdf_at(sample, grid[i]);
  }
  return out;
}

double quantile_plugin(const NoisySample& sample, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorCode::BadTau, "tau must lie in (0,1), got " + std::to_string(tau));
  }
  const auto n = static_cast<double>(sample.size());
  auto rank = static_cast<std::size_t>(std::ceil(tau * n));
  if (rank < 1) rank = 1;
  if (rank > sample.size()) rank = sample.size();
  return sample.sorted_draws()[rank - 1];
}

double sigma_F(const std::function<double(double)>& cdf, double theta1,
               double theta2) {
  return cdf(std::min(theta1, theta2)) - cdf(theta1) * cdf(theta2);
}

NoisySample reduce_panel_columns(const Panel& panel, std::size_t first,
                                 std::size_t count) {
  if (count < 2 || first + count > panel.n_periods()) {
    fail(ErrorCode::BadSplit, "column block [" + std::to_string(first) + ", " +
                                  std::to_string(first + count) +
                                  ") needs >= 2 columns inside the panel");
  }
  const std::size_t n = panel.n_units();
  std::vector<double> means(n), vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < count; ++t) sum += panel.at(i, first + t);
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
      const double d = panel.at(i, first + t) - mean;
      ss += d * d;
    }
    const double s2 = ss / static_cast<double>(count - 1);
    if (s2 <= 0.0) {
      fail(ErrorCode::ZeroVariance,
           "unit " + std::to_string(i) + " has constant observations");
    }
    means[i] = mean;
    vars[i] = s2;
  }
  return NoisySample::validate(std::move(means), std::move(vars),
                               static_cast<double>(count));
}

NoisySample reduce_panel(const Panel& panel) {
  return reduce_panel_columns(panel, 0, panel.n_periods());
}

}  // namespace latentdist
