#pragma once

#include <cmath>

namespace latentdist {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

// Standard normal density.
inline double normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Standard normal distribution function via erfc; absolute error well
// below 1e-12 over the whole real line, including deep tails.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

// phi'(x) = -x phi(x).
inline double normal_pdf_deriv(double x) {
  return -x * normal_pdf(x);
}

// Inverse standard normal CDF.  Rational initial guess (Acklam) polished
// with one Halley step against erfc, giving near machine accuracy.
double normal_quantile(double p);

}  // namespace latentdist
