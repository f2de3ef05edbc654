#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "maplab/sequence.hpp"

namespace maplab {

// Parameters of the smoothed surrogate L_{rho,gamma} and the difference
// f_{rho,beta,gamma}(x) = sum_j x_j^2/rho_j^2 - beta * L_{rho,gamma}(x).
// beta_star is the certified convexity threshold; larger beta may still be
// convex (the threshold is not sharp) and the certificates accept any beta.
struct ConvexifySpec {
  double p = 2.0;
  Vec rho;
  double gamma = 1.0;
  double beta = 0.0;

  static ConvexifySpec make(double p, Vec rho, double gamma, double beta);

  std::size_t dim() const { return rho.size(); }
  double alpha() const { return std::min(p, 2.0); }
  double q() const { return std::max(p, 2.0 * (p - 1.0) * (p - 1.0)); }
  double beta_star() const;  // 2 gamma^{2-alpha} / (q rho_1^alpha)
};

// Smoothed norm surrogate: sum_j (gamma^2 rho_j^2 + x_j^2)^{p/2} - (gamma rho_j)^p
// for 1 <= p <= 2, and ||x||_p^2 for p > 2.
double big_l(const ConvexifySpec& spec, const Vec& x);

double big_f(const ConvexifySpec& spec, const Vec& x);

struct SandwichResult {
  bool lower_ok = false;  // ||x||_p^alpha - gamma^alpha ||rho||_p^alpha <= L
  bool upper_ok = false;  // L <= ||x||_p^alpha
};

SandwichResult sandwich_check(const ConvexifySpec& spec, const Vec& x);

// Analytic Hessian of f; for p > 2 the formula is singular at the origin.
Eigen::MatrixXd hessian_f(const ConvexifySpec& spec, const Vec& x);

struct ConvexityCertificate {
  std::size_t violations = 0;
  double worst_gap = 0.0;  // most positive value of f(mid) - chord; <= 0 is clean
};

// Randomized midpoint tests over segment triples (including segments through
// the origin and segments ending at the origin) plus Hessian PSD spot checks.
ConvexityCertificate convexity_certificate(const ConvexifySpec& spec,
                                           std::size_t trials, std::uint64_t seed);

struct NonnegativityCertificate {
  std::size_t violations = 0;
  double min_value = 0.0;
};

NonnegativityCertificate nonnegativity_certificate(const ConvexifySpec& spec,
                                                   std::size_t trials,
                                                   std::uint64_t seed);

// Constructive convexity violation of the unsmoothed penalty
// x1^2 + x2^2 - beta (|x1| + |x2|)^2 at p = 1, k = 2. Returns
// f(mid) - chord value; positive for every beta > 0.
double naive_penalty_violation_gap(double beta);

struct LevelsetTables {
  std::size_t grid = 0;
  double lo = -3.0;
  double hi = 3.0;
  Vec left;   // row-major grid of the naive penalty surface
  Vec right;  // row-major grid of big_f
};

LevelsetTables figure_levelsets(double p, double beta_naive, const ConvexifySpec& spec,
                                std::size_t grid);

}  // namespace maplab
