#include "maplab/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maplab/rng.hpp"

namespace maplab {

namespace {
constexpr double kGapTol = 1e-9;
}

ConvexifySpec ConvexifySpec::make(double p, Vec rho, double gamma, double beta) {
  if (!(p >= 1.0)) throw std::invalid_argument("convexify.p: must be >= 1");
  if (rho.empty()) throw std::invalid_argument("convexify.rho: must be non-empty");
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!(rho[j] > 0.0)) throw std::invalid_argument("convexify.rho: entries must be positive");
    if (j > 0 && rho[j] > rho[j - 1])
      throw std::invalid_argument("convexify.rho: must be non-increasing");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("convexify.gamma: must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("convexify.beta: must be >= 0");
  return ConvexifySpec{p, std::move(rho), gamma, beta};
}

double ConvexifySpec::beta_star() const {
  return 2.0 * std::pow(gamma, 2.0 - alpha()) / (q() * std::pow(rho[0], alpha()));
}

double big_l(const ConvexifySpec& spec, const Vec& x) {
  if (x.size() != spec.dim()) throw std::invalid_argument("big_l: dimension mismatch");
  if (spec.p > 2.0) {
    double n = lp_norm(x, spec.p);
    return n * n;
  }
  CompensatedSum acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double t = spec.gamma * spec.rho[j];
    acc.add(std::pow(t * t + x[j] * x[j], 0.5 * spec.p) - std::pow(t, spec.p));
  }
  return acc.value();
}

double big_f(const ConvexifySpec& spec, const Vec& x) {
  if (x.size() != spec.dim()) throw std::invalid_argument("big_f: dimension mismatch");
  CompensatedSum quad;
  for (std::size_t j = 0; j < x.size(); ++j)
    quad.add(x[j] * x[j] / (spec.rho[j] * spec.rho[j]));
  return quad.value() - spec.beta * big_l(spec, x);
}

SandwichResult sandwich_check(const ConvexifySpec& spec, const Vec& x) {
  double l = big_l(spec, x);
  double alpha = spec.alpha();
  double xn = std::pow(lp_norm(x, spec.p), alpha);
  double rn = std::pow(spec.gamma * lp_norm(spec.rho, spec.p), alpha);
  SandwichResult out;
  double tol = 1e-12 * (1.0 + std::abs(xn) + rn);
  out.lower_ok = xn - rn <= l + tol;
  out.upper_ok = l <= xn + tol;
  return out;
}

Eigen::MatrixXd hessian_f(const ConvexifySpec& spec, const Vec& x) {
  if (x.size() != spec.dim()) throw std::invalid_argument("hessian_f: dimension mismatch");
  const std::size_t k = x.size();
  const double p = spec.p;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(k));
  if (p <= 2.0) {
    for (std::size_t j = 0; j < k; ++j) {
      double t2 = spec.gamma * spec.gamma * spec.rho[j] * spec.rho[j];
      double denom = std::pow(t2 + x[j] * x[j], 2.0 - 0.5 * p);
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
          2.0 / (spec.rho[j] * spec.rho[j]) -
          spec.beta * p * (t2 + (p - 1.0) * x[j] * x[j]) / denom;
    }
    return h;
  }
  double norm = lp_norm(x, p);
  if (norm == 0.0) throw std::domain_error("hessian_f: singular at the origin for p > 2");
  Eigen::VectorXd hv(static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    double g_j = std::pow(std::abs(x[j]) / norm, p - 2.0);
    h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
        2.0 / (spec.rho[j] * spec.rho[j]) - 2.0 * spec.beta * (p - 1.0) * g_j;
    hv[static_cast<Eigen::Index>(j)] =
        x[j] * std::pow(std::abs(x[j]), p - 2.0) / std::pow(norm, p - 1.0);
  }
  h += 2.0 * spec.beta * (p - 2.0) * hv * hv.transpose();
  return h;
}

ConvexityCertificate convexity_certificate(const ConvexifySpec& spec,
                                           std::size_t trials, std::uint64_t seed) {
  const std::size_t k = spec.dim();
  ConvexityCertificate out;
  out.worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    StreamRng rng(seed, t, 0);
    Vec x(k), y(k);
    for (std::size_t j = 0; j < k; ++j) x[j] = rng.uniform(-5.0, 5.0);
    switch (t % 3) {
      case 0:  // generic segment
        for (std::size_t j = 0; j < k; ++j) y[j] = rng.uniform(-5.0, 5.0);
        break;
      case 1:  // segment through the origin
        y = scale(x, -rng.uniform(0.1, 3.0));
        break;
      case 2:  // segment ending at the origin
        std::fill(y.begin(), y.end(), 0.0);
        break;
    }
    double lam = rng.uniform();
    Vec mid = add(scale(x, lam), scale(y, 1.0 - lam));
    double gap = big_f(spec, mid) -
                 (lam * big_f(spec, x) + (1.0 - lam) * big_f(spec, y));
    out.worst_gap = std::max(out.worst_gap, gap);
    if (gap > kGapTol) ++out.violations;

    // Hessian PSD spot check at generic points
    if (t % 64 == 0 && !(spec.p > 2.0 && lp_norm(x, spec.p) == 0.0)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_f(spec, x),
                                                        Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kGapTol) ++out.violations;
    }
  }
  return out;
}

NonnegativityCertificate nonnegativity_certificate(const ConvexifySpec& spec,
                                                   std::size_t trials,
                                                   std::uint64_t seed) {
  const std::size_t k = spec.dim();
  NonnegativityCertificate out;
  out.min_value = std::numeric_limits<double>::infinity();
  Vec best(k, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    StreamRng rng(seed, t, 1);
    Vec x(k);
    // mix of near-origin and wide-range starts
    double range = (t % 2 == 0) ? 1.0 : 8.0;
    for (std::size_t j = 0; j < k; ++j) x[j] = rng.uniform(-range, range);
    double v = big_f(spec, x);
    if (v < out.min_value) {
      out.min_value = v;
      best = x;
    }
  }
  // coordinate-descent refinement from the best start
  double step = 0.5;
  double v = out.min_value;
  Vec x = best;
  while (step > 1e-7) {
    bool improved = false;
    for (std::size_t j = 0; j < k; ++j) {
      for (double dir : {-1.0, 1.0}) {
        Vec trial = x;
        trial[j] += dir * step;
        double tv = big_f(spec, trial);
        if (tv < v) {
          v = tv;
          x = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  out.min_value = std::min(out.min_value, v);
  if (out.min_value < -kGapTol) ++out.violations;
  return out;
}

double naive_penalty_violation_gap(double beta) {
  if (!(beta > 0.0))
    throw std::invalid_argument("naive_penalty_violation_gap: beta must be positive");
  // midpoint convexity fails crossing the x2 = 0 axis: x = (1, t), y = (1, -t)
  // with t below 2 beta / (1 + beta)
  double t = beta / (1.0 + beta);
  auto f = [&](double x1, double x2) {
    double s = std::abs(x1) + std::abs(x2);
    return x1 * x1 + x2 * x2 - beta * s * s;
  };
  double chord = 0.5 * f(1.0, t) + 0.5 * f(1.0, -t);
  return f(1.0, 0.0) - chord;
}

LevelsetTables figure_levelsets(double p, double beta_naive, const ConvexifySpec& spec,
                                std::size_t grid) {
  if (spec.dim() != 2) throw std::invalid_argument("figure_levelsets: requires k = 2");
  if (grid < 2) throw std::invalid_argument("figure_levelsets: grid too small");
  LevelsetTables out;
  out.grid = grid;
  out.left.resize(grid * grid);
  out.right.resize(grid * grid);
  for (std::size_t i = 0; i < grid; ++i) {
    double x1 = out.lo + (out.hi - out.lo) * static_cast<double>(i) /
                             static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      double x2 = out.lo + (out.hi - out.lo) * static_cast<double>(j) /
                               static_cast<double>(grid - 1);
      Vec x{x1, x2};
      double n = lp_norm(x, p);
      out.left[i * grid + j] =
          x1 * x1 / (spec.rho[0] * spec.rho[0]) + x2 * x2 / (spec.rho[1] * spec.rho[1]) -
          beta_naive * n * n;
      out.right[i * grid + j] = big_f(spec, x);
    }
  }
  return out;
}

}  // namespace maplab
