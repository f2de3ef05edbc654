#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>

#include "maplab/sequence.hpp"

namespace maplab {

using Matrix = Eigen::MatrixXd;

// Measurement operator u -> G(u) in R^d. Linear models carry their matrix so
// the Jacobian is exact; user models may supply an analytic Jacobian or fall
// back to central finite differences.
struct ForwardModel {
  std::function<Vec(const Vec&)> map;
  std::function<Matrix(const Vec&)> jacobian;  // may be empty
  bool linear = false;
  Matrix matrix;  // valid iff linear

  static ForwardModel make_linear(Matrix a);
  static ForwardModel make_user(std::function<Vec(const Vec&)> map,
                                std::function<Matrix(const Vec&)> jacobian = {});
};

// Gaussian misfit  phi(u) = 1/2 || noise_prec_sqrt (y - G(u)) ||_2^2 - offset,
// with offset chosen at construction so phi(0) = 0.
class Potential {
 public:
  // Zero potential on R^k: posterior equals prior.
  static Potential zero(std::size_t dim);
  // input_dim is required for user-defined models; linear models infer it
  // from the matrix.
  static Potential gaussian_misfit(ForwardModel forward, Vec data,
                                   Matrix noise_prec_sqrt, std::size_t input_dim = 0);

  double operator()(const Vec& u) const;
  // Gradient of phi (exact for linear models; finite differences otherwise).
  Vec gradient(const Vec& u) const;

  bool is_zero() const { return zero_; }
  std::size_t input_dim() const { return input_dim_; }
  double offset() const { return offset_; }
  // Global lower bound M: the raw misfit is non-negative, so M = -offset.
  double lower_bound() const { return zero_ ? 0.0 : -offset_; }
  const ForwardModel& forward() const { return forward_; }
  const Vec& data() const { return data_; }
  const Matrix& noise_prec_sqrt() const { return noise_prec_sqrt_; }

 private:
  bool zero_ = false;
  std::size_t input_dim_ = 0;
  ForwardModel forward_;
  Vec data_;
  Matrix noise_prec_sqrt_;
  double offset_ = 0.0;

  double raw(const Vec& u) const;
};

// Empirical lower estimate of the local Lipschitz constant L(r) of phi on the
// l^p ball of radius r: max over sampled pairs of |phi(u1)-phi(u2)|/||u1-u2||_p.
// A diagnostic, not a certified constant.
double lipschitz_estimate(const Potential& pot, double r, double p,
                          std::size_t trials, std::uint64_t seed);

double om_value(const Potential& pot, const PriorSpec& prior, const Vec& u);

struct OmResult {
  Vec minimizer;
  double value = 0.0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

OmResult minimize_om(const Potential& pot, const PriorSpec& prior, const Vec& x0,
                     double tol, std::size_t max_iter);

}  // namespace maplab
