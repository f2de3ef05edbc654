#pragma once

#include <cstdint>
#include <string>

#include "maplab/gaussian.hpp"
#include "maplab/inverse.hpp"
#include "maplab/sequence.hpp"

namespace maplab {

struct BallQuery {
  Vec center;
  double delta = 0.0;  // l^p radius
  double p = 2.0;

  static BallQuery make(Vec center, double delta, double p);
};

enum class EstimateMethod { naive_mc, cm_shifted_mc, quadrature, uniform_is };

std::string to_string(EstimateMethod m);

struct BallMassEstimate {
  double value = 0.0;      // probability, or ratio when estimating ratios
  double std_error = 0.0;  // for quadrature: declared error bound
  std::size_t n_samples = 0;
  EstimateMethod method = EstimateMethod::naive_mc;
  bool reliable = true;  // false when effective sample size < 100
};

// Indicator-mean estimate of mu(B_delta(center)).
BallMassEstimate ball_mass_mc(const DiagonalGaussian& g, const BallQuery& q,
                              std::size_t n, std::uint64_t seed);

// Same estimand via a Cameron-Martin shift of mu to the ball center; far
// centers keep a usable effective sample size where naive MC returns zero.
BallMassEstimate ball_mass_shifted(const DiagonalGaussian& g, const BallQuery& q,
                                   std::size_t n, std::uint64_t seed);

// Deterministic tensor/iterated quadrature, dim <= 3, absolute error <= 1e-8.
BallMassEstimate ball_mass_quadrature(const DiagonalGaussian& g, const BallQuery& q);

// Density-average importance sampling: draw u uniformly in the l^p delta-ball
// and average vol * density(center + u). Relative error stays bounded as
// delta -> 0, which indicator estimators cannot do.
BallMassEstimate ball_mass_uniform(const DiagonalGaussian& g, const BallQuery& q,
                                   std::size_t n, std::uint64_t seed);

// Prior ratio R_delta(w, z) = mu(B_delta(w)) / mu(B_delta(z)) with common
// random numbers across numerator and denominator; std_error by the delta
// method on the log-ratio.
BallMassEstimate prior_ball_ratio(const DiagonalGaussian& g, const Vec& w, const Vec& z,
                                  double delta, double p, std::size_t n,
                                  std::uint64_t seed);
// Same ratio through uniform-in-ball importance sampling (usable at tiny delta).
BallMassEstimate prior_ball_ratio_uniform(const DiagonalGaussian& g, const Vec& w,
                                          const Vec& z, double delta, double p,
                                          std::size_t n, std::uint64_t seed);

// Posterior ratio of int_{B(w)} e^{-phi} dmu over int_{B(z)} e^{-phi} dmu;
// the normalization Z cancels and is never computed.
BallMassEstimate posterior_ball_ratio(const DiagonalGaussian& g, const Potential& pot,
                                      const Vec& w, const Vec& z, double delta,
                                      double p, std::size_t n, std::uint64_t seed);
// Uniform-in-ball variant for small radii.
BallMassEstimate posterior_ball_ratio_uniform(const DiagonalGaussian& g,
                                              const Potential& pot, const Vec& w,
                                              const Vec& z, double delta, double p,
                                              std::size_t n, std::uint64_t seed);

// Quadrature of the unnormalized posterior mass int_{B_delta(c)} e^{-phi} dmu,
// dim == 1 only.
double posterior_mass_quadrature_1d(const DiagonalGaussian& g, const Potential& pot,
                                    double center, double delta);

// Upper bound exp(-(a_n/2) [ (||tail_{n-1} z||_2 - delta)^2 - delta^2 ]) on the
// prior ratio R_delta(z, 0); p = 2 only.
double hilbert_ratio_bound(const PriorSpec& prior, const Vec& z, double delta,
                           std::size_t n_index);

// Upper bound on R_delta(z, 0) for general p, from the convexified-surrogate
// extraction at truncation index k_index and smoothing scale gamma.
double lp_ratio_bound(const PriorSpec& prior, const Vec& z, double delta,
                      std::size_t k_index, double gamma);

struct AndersonResult {
  bool holds = false;
  double margin = 0.0;  // mu(B(center)) - mu(B(0)), estimated
  double combined_se = 0.0;
};

// Checks the centred-ball domination mu(B_delta(center)) <= mu(B_delta(0)).
AndersonResult anderson_check(const DiagonalGaussian& g, const BallQuery& q,
                              std::size_t n, std::uint64_t seed);

// Uniform draw in the l^p delta-ball around 0, stream (seed, index, .).
Vec uniform_in_lp_ball(std::size_t dim, double p, double delta, std::uint64_t seed,
                       std::uint64_t index);

// Volume of the l^p ball of radius delta in R^dim.
double lp_ball_volume(std::size_t dim, double p, double delta);

}  // namespace maplab
