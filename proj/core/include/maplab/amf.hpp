#pragma once

#include <cstdint>
#include <vector>

#include "maplab/gaussian.hpp"
#include "maplab/inverse.hpp"
#include "maplab/smallball.hpp"

namespace maplab {

struct DeltaSchedule {
  Vec deltas;  // strictly decreasing, positive
  Vec eps;     // slack per delta, in (0,1), decreasing with delta

  static DeltaSchedule make(Vec deltas, Vec eps);
  // delta_m = 2^{-m}, eps = delta, m = 1..length
  static DeltaSchedule dyadic(std::size_t length);

  std::size_t size() const { return deltas.size(); }
};

struct AmfRecord {
  double delta = 0.0;
  double eps = 0.0;
  Vec center;
  BallMassEstimate achieved_ratio;       // mass(center) / best candidate mass
  BallMassEstimate prior_ratio_to_zero;  // R_delta(center, 0) under the prior
  double distance_to_om = 0.0;           // l^p distance to the OM minimizer
  bool indeterminate = false;            // MC error exceeded the slack
};

struct AmfTrace {
  DeltaSchedule schedule;
  std::vector<AmfRecord> records;
  Vec om_minimizer;
  double refinement_step = 0.0;  // final local-search resolution
};

struct AmfOptions {
  std::size_t candidates = 32;   // prior-sample pool size per delta
  std::size_t n_samples = 100000;
  double p = 2.0;                // ambient norm exponent
  double refine_floor = 5e-4;    // coordinate-search step lower bound
};

// Builds an asymptotic maximizing family over the schedule: at each delta the
// supremal posterior ball mass is approximated over a candidate pool (prior
// samples, the OM minimizer, the previous center) plus coordinate-search
// refinement; the argmax is recorded with its diagnostics.
AmfTrace build_amf(const DiagonalGaussian& g, const Potential& pot,
                   const PriorSpec& prior, const DeltaSchedule& schedule,
                   const AmfOptions& opts, std::uint64_t seed);

struct ShellBound {
  double k_empirical = 0.0;    // min over delta of prior ratio minus 3 SE
  double k_theoretical = 0.0;  // e^{M - L(1)} / 2 with empirical L(1)
  double lipschitz_1 = 0.0;
  double lower_bound_m = 0.0;
  bool holds = false;
};

ShellBound check_shell_bound(const AmfTrace& trace, const Potential& pot,
                             const DiagonalGaussian& g, double p, std::uint64_t seed);

struct OmLimitRow {
  double delta = 0.0;
  double ratio = 0.0;   // R^posterior_delta(z1, z2)
  double target = 0.0;  // exp(I(z2) - I(z1))
  double abs_error = 0.0;
  bool flagged = false;  // MC error above 20% of the target gap
};

// Posterior ball-mass ratios along decreasing deltas against the
// OM-difference limit. Quadrature for dim 1, uniform-in-ball importance
// sampling otherwise.
std::vector<OmLimitRow> verify_om_limit(const DiagonalGaussian& g, const Potential& pot,
                                        const PriorSpec& prior, const Vec& z1,
                                        const Vec& z2, const Vec& deltas, double p,
                                        std::size_t n, std::uint64_t seed);

enum class VanishingScenario { unbounded, outside_e_proxy, weak_not_strong_proxy };

struct VanishingRow {
  double delta = 0.0;
  double ratio = 0.0;  // R^mu_delta(x_m, 0)
  double bound = 0.0;  // matching analytic upper bound
  bool below_floor = false;
};

// Canonical escape sequences at the truncation, one per schedule entry:
//   unbounded:           x_m = (m, 0, ...) with ||x_m||_p = m
//   outside_e_proxy:     growing-dimension heads of a sequence with diverging
//                        Cameron-Martin norm (scale * sigma_j per coordinate)
//   weak_not_strong:     x_m = scale * e_m, mass escaping to high coordinates
std::vector<VanishingRow> check_vanishing_conditions(const PriorSpec& prior,
                                                     VanishingScenario scenario,
                                                     const DeltaSchedule& schedule,
                                                     double scale, std::size_t n,
                                                     std::uint64_t seed);

}  // namespace maplab
