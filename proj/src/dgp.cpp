#include "latentdist/dgp.hpp"

#include <algorithm>
#include <cmath>

#include "latentdist/empirical.hpp"
#include "latentdist/rng.hpp"
#include "latentdist/special.hpp"

namespace latentdist {

namespace {

constexpr double kPi = 3.141592653589793238462643;

}  // namespace

std::string design_kind_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::normal: return "normal";
    case DesignKind::skew_normal: return "skew_normal";
    case DesignKind::binomial: return "binomial";
  }
  return "unknown";
}

DesignKind parse_design_kind(const std::string& name) {
  if (name == "normal") return DesignKind::normal;
  if (name == "skew_normal") return DesignKind::skew_normal;
  if (name == "binomial") return DesignKind::binomial;
  fail(ErrorCode::BadSpec, "unknown design kind '" + name + "'");
}

void DesignSpec::validate() const {
  if (n < 2 || m < 2) {
    fail(ErrorCode::BadSpec, "design needs n >= 2 and m >= 2");
  }
  if (kind != DesignKind::binomial && (!(psi2 > 0.0) || !(sigma2 > 0.0))) {
    fail(ErrorCode::BadSpec, "design needs psi2 > 0 and sigma2 > 0");
  }
}

SkewNoiseParams skew_noise_params(double sigma2) {
  SkewNoiseParams p;
  const double d2 = kSkewDelta * kSkewDelta;
  p.omega = std::sqrt(sigma2 / (1.0 - 2.0 * d2 / kPi));
  p.xi = -p.omega * kSkewDelta * std::sqrt(2.0 / kPi);
  return p;
}

PanelDraw gen_normal(const DesignSpec& spec, std::uint64_t replication) {
  spec.validate();
  if (spec.kind != DesignKind::normal) {
    fail(ErrorCode::BadSpec, "gen_normal called on a non-normal design");
  }
  CounterRng rng = CounterRng(spec.seed).substream(replication);
  const double psi = std::sqrt(spec.psi2);
  const double sigma = std::sqrt(spec.sigma2);
  PanelDraw out;
  out.thetas.resize(spec.n);
  std::vector<double> data(spec.n * spec.m);
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.thetas[i] = spec.eta + psi * rng.normal(i);
    for (std::size_t t = 0; t < spec.m; ++t) {
      data[i * spec.m + t] = out.thetas[i] + sigma * rng.normal(spec.n + i * spec.m + t);
    }
  }
  out.panel = Panel::validate(std::move(data), spec.n, spec.m);
  return out;
}

PanelDraw gen_skew_normal(const DesignSpec& spec, std::uint64_t replication) {
  spec.validate();
  if (spec.kind != DesignKind::skew_normal) {
    fail(ErrorCode::BadSpec, "gen_skew_normal called on a non-skew design");
  }
  CounterRng rng = CounterRng(spec.seed).substream(replication);
  const double psi = std::sqrt(spec.psi2);
  const SkewNoiseParams p = skew_noise_params(spec.sigma2);
  const double ortho = std::sqrt(1.0 - kSkewDelta * kSkewDelta);
  PanelDraw out;
  out.thetas.resize(spec.n);
  std::vector<double> data(spec.n * spec.m);
  // Counter layout: thetas first, then two normals per cell.
  const std::uint64_t cell_base = spec.n;
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.thetas[i] = spec.eta + psi * rng.normal(i);
    for (std::size_t t = 0; t < spec.m; ++t) {
      const std::uint64_t cell = cell_base + 2 * (i * spec.m + t);
      const double z1 = rng.normal(cell);
      const double z2 = rng.normal(cell + 1);
      const double sn = kSkewDelta * std::abs(z1) + ortho * z2;
      data[i * spec.m + t] = out.thetas[i] + p.xi + p.omega * sn;
    }
  }
  out.panel = Panel::validate(std::move(data), spec.n, spec.m);
  return out;
}

SampleDraw gen_binomial(const DesignSpec& spec, std::uint64_t replication) {
  spec.validate();
  if (spec.kind != DesignKind::binomial) {
    fail(ErrorCode::BadSpec, "gen_binomial called on a non-binomial design");
  }
  CounterRng rng = CounterRng(spec.seed).substream(replication);
  const double md = static_cast<double>(spec.m);
  const double var_floor = (1.0 / md) * (1.0 - 1.0 / md);
  SampleDraw out;
  out.thetas.resize(spec.n);
  std::vector<double> draws(spec.n), vars(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.thetas[i] = rng.uniform(i);
    std::size_t successes = 0;
    for (std::size_t t = 0; t < spec.m; ++t) {
      if (rng.uniform(spec.n + i * spec.m + t) < out.thetas[i]) ++successes;
    }
    draws[i] = static_cast<double>(successes) / md;
    const double v = draws[i] * (1.0 - draws[i]);
    vars[i] = v > 0.0 ? v : var_floor;
  }
  out.sample = NoisySample::validate(std::move(draws), std::move(vars), md);
  return out;
}

SampleDraw gen_sample(const DesignSpec& spec, std::uint64_t replication) {
  switch (spec.kind) {
    case DesignKind::normal: {
      PanelDraw p = gen_normal(spec, replication);
      return SampleDraw{reduce_panel(p.panel), std::move(p.thetas)};
    }
    case DesignKind::skew_normal: {
      PanelDraw p = gen_skew_normal(spec, replication);
      return SampleDraw{reduce_panel(p.panel), std::move(p.thetas)};
    }
    case DesignKind::binomial:
      return gen_binomial(spec, replication);
  }
  fail(ErrorCode::BadSpec, "unreachable design kind");
}

double true_cdf(const DesignSpec& spec, double theta) {
  if (spec.kind == DesignKind::binomial) {
    if (theta < 0.0) return 0.0;
    if (theta > 1.0) return 1.0;
    return theta;
  }
  return normal_cdf((theta - spec.eta) / std::sqrt(spec.psi2));
}

double true_quantile(const DesignSpec& spec, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorCode::BadTau, "tau must lie in (0,1)");
  }
  if (spec.kind == DesignKind::binomial) return tau;
  return spec.eta + std::sqrt(spec.psi2) * normal_quantile(tau);
}

std::vector<double> noisy_quantiles(const DesignSpec& spec,
                                    const std::vector<double>& taus) {
  spec.validate();
  for (double tau : taus) {
    if (!(tau > 0.0 && tau < 1.0)) {
      fail(ErrorCode::BadTau, "tau must lie in (0,1)");
    }
  }
  std::vector<double> out(taus.size());
  if (spec.kind == DesignKind::normal) {
    const double s =
        std::sqrt(spec.psi2 + spec.sigma2 / static_cast<double>(spec.m));
    for (std::size_t j = 0; j < taus.size(); ++j) {
      out[j] = spec.eta + s * normal_quantile(taus[j]);
    }
    return out;
  }
  // No closed form for the skew/binomial designs: take empirical quantiles
  // of a large sample of noisy draws.  The seed is a fixed constant so the
  // evaluation points do not move with the design's simulation seed.
  constexpr std::size_t kDraws = 2'000'000;
  DesignSpec probe = spec;
  probe.seed = UINT64_C(0x9d5c1f3a2b7e4d60);
  probe.n = 1;
  std::vector<double> draws;
  draws.reserve(kDraws);
  RngStream stream{CounterRng(probe.seed).substream(0)};
  if (spec.kind == DesignKind::skew_normal) {
    const SkewNoiseParams sn = skew_noise_params(spec.sigma2);
    const double psi = std::sqrt(spec.psi2);
    const double tail = std::sqrt(1.0 - kSkewDelta * kSkewDelta);
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double theta = spec.eta + psi * stream.normal();
      double noise = 0.0;
      for (std::size_t t = 0; t < spec.m; ++t) {
        const double sn_std =
            kSkewDelta * std::fabs(stream.normal()) + tail * stream.normal();
        noise += sn.xi + sn.omega * sn_std;
      }
      draws.push_back(theta + noise / static_cast<double>(spec.m));
    }
  } else {
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double theta = stream.uniform();
      std::size_t hits = 0;
      for (std::size_t t = 0; t < spec.m; ++t) {
        if (stream.uniform() < theta) ++hits;
      }
      draws.push_back(static_cast<double>(hits) /
                      static_cast<double>(spec.m));
    }
  }
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(taus[j] * static_cast<double>(kDraws)));
    const std::size_t idx = (k == 0 ? 0 : k - 1);
    std::nth_element(draws.begin(),
                     draws.begin() + static_cast<std::ptrdiff_t>(idx),
                     draws.end());
    out[j] = draws[idx];
  }
  return out;
}

double true_bias_cdf(const DesignSpec& spec, double theta) {
  if (spec.kind == DesignKind::binomial) {
    // beta(t) = t (1 - t) f(t) / 2 with f = 1 on [0,1].
    if (theta <= 0.0 || theta >= 1.0) return 0.0;
    return 0.5 * (1.0 - 2.0 * theta);
  }
  const double psi = std::sqrt(spec.psi2);
  const double z = (theta - spec.eta) / psi;
  return -0.5 * (theta - spec.eta) * (spec.sigma2 / spec.psi2) *
         normal_pdf(z) / psi;
}

double true_bias_quantile(const DesignSpec& spec, double tau) {
  if (spec.kind == DesignKind::binomial) {
    // -b_F(q)/f(q) with f = 1: -(1 - 2 tau)/2.
    return -0.5 * (1.0 - 2.0 * tau);
  }
  return 0.5 * (spec.sigma2 / spec.psi2) * (true_quantile(spec, tau) - spec.eta);
}

}  // namespace latentdist
