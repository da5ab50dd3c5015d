#pragma once

#include <vector>

#include "latentdist/types.hpp"

namespace latentdist {

// Parametric shrinkage toward eta with factor 1 - (s2/m)/(s2/m + psi2).
std::vector<double> parametric_shrink(const NoisySample& sample, double sigma2,
                                      double psi2, double eta);

struct EbEstimates {
  std::vector<double> values;
  // Units whose kernel density hit the numerical floor.
  std::vector<std::size_t> degenerate_units;
};

// Tweedie-style Empirical Bayes under homoskedastic noise:
//   v_i + (sigma2 / m) * d/dv log p_hat(v_i)
// with p_hat a leave-self-in Gaussian KDE on the draws.
EbEstimates empirical_bayes(const NoisySample& sample, double sigma2,
                            double h_eb);

// Silverman's rule 1.06 s n^{-1/5}.
double silverman_bandwidth(const NoisySample& sample);

// Normal-reference bandwidth at the noise scale of the within-unit average:
// silverman_bandwidth / sqrt(m).  The score has to be resolved at the scale
// of the noise being removed, not at the scale of the draws themselves.
double eb_bandwidth(const NoisySample& sample);

}  // namespace latentdist
