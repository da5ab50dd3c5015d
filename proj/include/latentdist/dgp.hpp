#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentdist/types.hpp"

namespace latentdist {

enum class DesignKind { normal, skew_normal, binomial };

std::string design_kind_name(DesignKind kind);
DesignKind parse_design_kind(const std::string& name);

// One simulation design: dimensions, distribution parameters, and the root
// seed.  Replication r draws from a substream of (seed, r), so output is
// identical no matter how replications are scheduled.
struct DesignSpec {
  DesignKind kind = DesignKind::normal;
  std::size_t n = 0;
  std::size_t m = 0;
  double psi2 = 1.0;   // variance of the latent effects (normal/skew)
  double sigma2 = 5.0; // noise variance (normal/skew)
  double eta = 0.0;    // mean of the latent effects
  std::uint64_t seed = 0;

  void validate() const;
};

struct PanelDraw {
  Panel panel;
  std::vector<double> thetas;  // latent effects, for oracle comparisons
};

struct SampleDraw {
  NoisySample sample;
  std::vector<double> thetas;
};

PanelDraw gen_normal(const DesignSpec& spec, std::uint64_t replication);
PanelDraw gen_skew_normal(const DesignSpec& spec, std::uint64_t replication);
SampleDraw gen_binomial(const DesignSpec& spec, std::uint64_t replication);

// Noisy sample for any design kind (panels are reduced to row means).
SampleDraw gen_sample(const DesignSpec& spec, std::uint64_t replication);

// Azzalini skew-normal shape used for the skew design.
inline constexpr double kSkewAlpha = 1.0;
inline constexpr double kSkewDelta = 0.7071067811865475244;  // a/sqrt(1+a^2)

// Shifted skew-normal noise parameters for a target variance.
struct SkewNoiseParams {
  double omega = 0.0;  // scale
  double xi = 0.0;     // shift making the mean zero
};
SkewNoiseParams skew_noise_params(double sigma2);

// Population truth for a design: F, q, and the leading bias functions.
double true_cdf(const DesignSpec& spec, double theta);
double true_quantile(const DesignSpec& spec, double tau);

// Quantiles of the marginal distribution of the noisy draws themselves
// (latent effect plus averaging noise).  Closed form for the normal design;
// a large fixed-seed sample otherwise.  These are the natural evaluation
// points for size studies of the distribution-function estimators.
std::vector<double> noisy_quantiles(const DesignSpec& spec,
                                    const std::vector<double>& taus);
// b_F(theta) = -((theta - eta)/2) (sigma2/psi2) phi((theta - eta)/psi);
// only defined for the normal/skew designs.
double true_bias_cdf(const DesignSpec& spec, double theta);
// b_q(tau) = (sigma2/psi2)/2 (q(tau) - eta).
double true_bias_quantile(const DesignSpec& spec, double tau);

}  // namespace latentdist
