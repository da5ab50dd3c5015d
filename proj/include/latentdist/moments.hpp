#pragma once

#include <functional>
#include <vector>

#include "latentdist/types.hpp"

namespace latentdist {

struct VarianceEstimate {
  double psi2_hat = 0.0;    // sample variance of the row means
  double psi2_check = 0.0;  // corrected: subtracts s_i^2 / m per unit
  double se_hat = 0.0;
  double se_check = 0.0;
};

// Between-unit variance of the latent effects from a balanced panel, naive
// and corrected, each with the standard error of its per-unit terms.
VarianceEstimate corrected_variance(const Panel& panel);

struct MomentEstimate {
  double mu_hat = 0.0;
  double mu_check = 0.0;
  double se = 0.0;
};

// Plug-in mean of phi(draws) with the second-order correction
// mu_check = mu_hat - mean(phi''(v_i) sigma_i^2) / (2 m).
MomentEstimate corrected_moment(const NoisySample& sample,
                                const std::function<double(double)>& phi,
                                const std::function<double(double)>& phi_dd);

// Fraction of two-sided t-test rejections of |est - true| / se at the
// given nominal level.
double t_test_size(const std::vector<double>& estimates,
                   const std::vector<double>& ses, double true_value,
                   double level);

}  // namespace latentdist
