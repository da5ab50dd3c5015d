#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "latentdist/types.hpp"

namespace testutil {

// Adaptive Simpson quadrature.  Plenty for the smooth Gaussian integrands
// the oracles below need; tol is an absolute error target.
inline double simpson_leaf(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_leaf(f, a, m, fa, flm, fm);
  const double right = simpson_leaf(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson_leaf(f, a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Random small samples for property checks; mt19937 keeps them portable
// and reproducible.
inline latentdist::NoisySample random_sample(std::mt19937& gen, std::size_t n,
                                             double m) {
  std::normal_distribution<double> loc(0.0, 1.5);
  std::uniform_real_distribution<double> var(0.2, 4.0);
  std::vector<double> draws(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    draws[i] = loc(gen);
    noise[i] = var(gen);
  }
  return latentdist::NoisySample::validate(draws, noise, m);
}

}  // namespace testutil
