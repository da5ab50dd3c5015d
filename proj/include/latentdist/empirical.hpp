#pragma once

#include <functional>
#include <vector>

#include "latentdist/types.hpp"

namespace latentdist {

// Fraction of draws <= theta (closed right indicator).
double ecdf_at(const NoisySample& sample, double theta);

// ECDF evaluated at every grid point; nondecreasing by construction.
std::vector<double> ecdf(const NoisySample& sample, const ThetaGrid& grid);

// Plug-in quantile: order statistic of rank ceil(tau * n).
double quantile_plugin(const NoisySample& sample, double tau);

// Covariance function of the limiting process: F(min) - F(t1) F(t2).
double sigma_F(const std::function<double(double)>& cdf, double theta1,
               double theta2);

// Row means and unbiased within-row variances of a balanced panel.
// A constant row (zero s_i^2) is an error since the corrections divide
// meaningfully by scale.
NoisySample reduce_panel(const Panel& panel);

// Same reduction restricted to columns [first, first + count).
NoisySample reduce_panel_columns(const Panel& panel, std::size_t first,
                                 std::size_t count);

}  // namespace latentdist
