#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "latentdist/errors.hpp"

namespace latentdist {

// Estimate-level data: noisy draws of the latent effects together with
// per-unit noise variances (on the scale of a single observation, i.e. the
// sampling variance of draw i is noise_var[i] / m).
class NoisySample {
 public:
  NoisySample() = default;  // empty placeholder; use validate()

  static NoisySample validate(std::vector<double> draws,
                              std::vector<double> noise_var, double m);

  const std::vector<double>& draws() const { return draws_; }
  const std::vector<double>& noise_var() const { return noise_var_; }
  double m() const { return m_; }
  std::size_t size() const { return draws_.size(); }

  // Draws in ascending order, paired with their noise variances.
  const std::vector<double>& sorted_draws() const { return sorted_draws_; }

 private:
  std::vector<double> draws_;
  std::vector<double> noise_var_;
  std::vector<double> sorted_draws_;
  double m_ = 0.0;
};

// Balanced n x m panel of raw observations, row-major.
class Panel {
 public:
  Panel() = default;  // empty placeholder; use validate()

  static Panel validate(std::vector<double> data, std::size_t n,
                        std::size_t m);

  double at(std::size_t unit, std::size_t period) const {
    return data_[unit * m_ + period];
  }
  std::size_t n_units() const { return n_; }
  std::size_t n_periods() const { return m_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
};

// Strictly increasing evaluation abscissae for CDF-valued estimators.
class ThetaGrid {
 public:
  ThetaGrid() = default;  // empty placeholder; use validate()/linspace()

  static ThetaGrid validate(std::vector<double> points);
  static ThetaGrid linspace(double lo, double hi, std::size_t count);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

enum class Method {
  naive,
  analytic,
  split_jackknife,
  lambda_jackknife,
};

std::string method_name(Method method);

struct CdfEstimate {
  ThetaGrid grid;
  std::vector<double> f_hat;        // naive ECDF on the grid
  std::vector<double> bias_hat;     // estimated leading bias (b units)
  std::vector<double> f_corrected;  // f_hat - bias_hat / m
  std::vector<double> se;
  Method method = Method::naive;
};

struct QuantileEstimate {
  double tau = 0.0;
  double q_naive = 0.0;
  double q_corrected = 0.0;
  double tau_star = 0.0;  // adjusted rank fraction (analytic method)
  bool has_ci = false;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  Method method = Method::naive;
};

}  // namespace latentdist
