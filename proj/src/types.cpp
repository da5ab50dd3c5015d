#include "latentdist/types.hpp"

#include <algorithm>
#include <cmath>

namespace latentdist {

NoisySample NoisySample::validate(std::vector<double> draws,
                                  std::vector<double> noise_var, double m) {
  if (draws.size() != noise_var.size()) {
    fail(ErrorCode::LengthMismatch,
         "draws has " + std::to_string(draws.size()) + " entries, noise_var " +
             std::to_string(noise_var.size()));
  }
  if (draws.size() < 2) {
    fail(ErrorCode::TooFewUnits, "need at least 2 units, got " +
                                     std::to_string(draws.size()));
  }
  if (!std::isfinite(m) || m < 1.0) {
    fail(ErrorCode::BadM, "m must be >= 1, got " + std::to_string(m));
  }
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (!std::isfinite(draws[i])) {
      fail(ErrorCode::NonFinite, "draw " + std::to_string(i) + " is not finite");
    }
    if (!std::isfinite(noise_var[i])) {
      fail(ErrorCode::NonFinite,
           "noise_var " + std::to_string(i) + " is not finite");
    }
    if (noise_var[i] <= 0.0) {
      fail(ErrorCode::NonPositiveVariance,
           "noise_var " + std::to_string(i) + " = " +
               std::to_string(noise_var[i]));
    }
  }
  NoisySample s;
  s.draws_ = std::move(draws);
  s.noise_var_ = std::move(noise_var);
  s.m_ = m;
  s.sorted_draws_ = s.draws_;
  std::sort(s.sorted_draws_.begin(), s.sorted_draws_.end());
  return s;
}

Panel Panel::validate(std::vector<double> data, std::size_t n, std::size_t m) {
  if (n < 2) {
    fail(ErrorCode::TooFewUnits, "panel needs n >= 2, got " + std::to_string(n));
  }
  if (m < 2) {
    fail(ErrorCode::BadM, "panel needs m >= 2, got " + std::to_string(m));
  }
  if (data.size() != n * m) {
    fail(ErrorCode::LengthMismatch,
         "panel data has " + std::to_string(data.size()) + " entries, expected " +
             std::to_string(n * m));
  }
  for (double x : data) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::NonFinite, "panel contains a non-finite entry");
    }
  }
  Panel p;
  p.data_ = std::move(data);
  p.n_ = n;
  p.m_ = m;
  return p;
}

ThetaGrid ThetaGrid::validate(std::vector<double> points) {
  if (points.empty()) {
    fail(ErrorCode::BadGrid, "grid is empty");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      fail(ErrorCode::NonFinite, "grid point " + std::to_string(i) +
                                     " is not finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      fail(ErrorCode::BadGrid,
           "grid not strictly increasing at index " + std::to_string(i));
    }
  }
  ThetaGrid g;
  g.points_ = std::move(points);
  return g;
}

ThetaGrid ThetaGrid::linspace(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    if (count == 1 && std::isfinite(lo)) return validate({lo});
    fail(ErrorCode::BadGrid, "bad linspace parameters");
  }
  std::vector<double> pts(count);
  if (count == 1) {
    pts[0] = lo;
  } else {
    double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
      pts[i] = lo + step * static_cast<double>(i);
    }
    pts.back() = hi;
  }
  return validate(std::move(pts));
}

std::string method_name(Method method) {
  switch (method) {
    case Method::naive: return "naive";
    case Method::analytic: return "analytic";
    case Method::split_jackknife: return "split_jackknife";
    case Method::lambda_jackknife: return "lambda_jackknife";
  }
  return "unknown";
}

}  // namespace latentdist
