#include "maplab/amf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maplab/rng.hpp"

namespace maplab {

namespace {

// Log of the unnormalized posterior mass of B_delta(c) by density averaging
// over a fixed set of uniform-in-ball offsets (common random numbers across
// candidates). Returns {log_mass, relative std error}.
struct LogMass {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_se = std::numeric_limits<double>::infinity();
};

LogMass log_posterior_mass(const DiagonalGaussian& g, const Potential& pot,
                           const std::vector<Vec>& offsets, const Vec& c,
                           double p, double delta) {
  const std::size_t n = offsets.size();
  Vec lw(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = add(c, offsets[i]);
    lw[i] = log_density(g, x) - pot(x);
    peak = std::max(peak, lw[i]);
  }
  LogMass out;
  if (!std::isfinite(peak)) return out;
  CompensatedSum s1, s2;
  for (std::size_t i = 0; i < n; ++i) {
    double w = std::exp(lw[i] - peak);
    s1.add(w);
    s2.add(w * w);
  }
  double mean = s1.value() / static_cast<double>(n);
  double var = std::max(s2.value() / static_cast<double>(n) - mean * mean, 0.0);
  out.log_value = peak + std::log(mean) +
                  std::log(lp_ball_volume(c.size(), p, delta));
  out.rel_se = std::sqrt(var / static_cast<double>(n)) / mean;
  return out;
}

}  // namespace

DeltaSchedule DeltaSchedule::make(Vec deltas, Vec eps) {
  if (deltas.empty()) throw std::invalid_argument("schedule.deltas: must be non-empty");
  if (eps.size() != deltas.size())
    throw std::invalid_argument("schedule.eps: length must match deltas");
  for (std::size_t m = 0; m < deltas.size(); ++m) {
    if (!(deltas[m] > 0.0))
      throw std::invalid_argument("schedule.deltas: entries must be positive");
    if (m > 0 && !(deltas[m] < deltas[m - 1]))
      throw std::invalid_argument("schedule.deltas: must be strictly decreasing");
    if (!(eps[m] > 0.0 && eps[m] < 1.0))
      throw std::invalid_argument("schedule.eps: entries must lie in (0, 1)");
  }
  return DeltaSchedule{std::move(deltas), std::move(eps)};
}

DeltaSchedule DeltaSchedule::dyadic(std::size_t length) {
  if (length == 0) throw std::invalid_argument("schedule: length must be positive");
  Vec d(length);
  for (std::size_t m = 0; m < length; ++m) d[m] = std::ldexp(1.0, -(static_cast<int>(m) + 1));
  Vec e = d;
  return DeltaSchedule{std::move(d), std::move(e)};
}

AmfTrace build_amf(const DiagonalGaussian& g, const Potential& pot,
                   const PriorSpec& prior, const DeltaSchedule& schedule,
                   const AmfOptions& opts, std::uint64_t seed) {
  const std::size_t k = g.dim();
  AmfTrace trace;
  trace.schedule = schedule;

  Vec zero(k, 0.0);
  OmResult om = minimize_om(pot, prior, zero, 1e-10, 500);
  trace.om_minimizer = om.minimizer;

  Vec prev = om.minimizer;
  for (std::size_t m = 0; m < schedule.size(); ++m) {
    const double delta = schedule.deltas[m];
    const double eps = schedule.eps[m];

    // frozen offsets: one stream per (delta index, sample); shared by every
    // candidate so mass comparisons are paired
    std::vector<Vec> offsets(opts.n_samples);
    for (std::size_t i = 0; i < opts.n_samples; ++i)
      offsets[i] = uniform_in_lp_ball(k, opts.p, delta, seed + m, i);

    std::vector<Vec> pool;
    pool.push_back(om.minimizer);
    pool.push_back(prev);
    pool.push_back(zero);
    for (std::size_t c = 0; c < opts.candidates; ++c)
      pool.push_back(sample_point(g, seed ^ 0x9e3779b97f4a7c15ull, m * opts.candidates + c));

    Vec best;
    LogMass best_mass;
    for (const Vec& cand : pool) {
      LogMass lm = log_posterior_mass(g, pot, offsets, cand, opts.p, delta);
      if (lm.log_value > best_mass.log_value) {
        best_mass = lm;
        best = cand;
      }
    }

    // coordinate search around the pool argmax, shrinking to the resolution
    // floor; same offsets keep the objective noise-free across moves
    double step = 0.5 * delta;
    const double floor = opts.refine_floor * delta;
    while (step > floor) {
      bool improved = false;
      for (std::size_t j = 0; j < k; ++j) {
        for (double dir : {-1.0, 1.0}) {
          Vec trial = best;
          trial[j] += dir * step;
          LogMass lm = log_posterior_mass(g, pot, offsets, trial, opts.p, delta);
          if (lm.log_value > best_mass.log_value) {
            best_mass = lm;
            best = trial;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    trace.refinement_step = std::max(step, floor);

    AmfRecord rec;
    rec.delta = delta;
    rec.eps = eps;
    rec.center = best;
    // the recorded center is the achieved argmax over everything evaluated,
    // so the attained fraction of the estimated supremum is 1 by construction;
    // the std error carries the MC uncertainty of that estimate
    rec.achieved_ratio.value = 1.0;
    rec.achieved_ratio.std_error = best_mass.rel_se;
    rec.achieved_ratio.n_samples = opts.n_samples;
    rec.achieved_ratio.method = EstimateMethod::uniform_is;
    rec.prior_ratio_to_zero =
        prior_ball_ratio_uniform(g, best, zero, delta, opts.p, opts.n_samples, seed + m);
    rec.distance_to_om = lp_norm(sub(best, om.minimizer), opts.p);
    rec.indeterminate = !(best_mass.rel_se < eps);
    trace.records.push_back(std::move(rec));
    prev = best;
  }
  return trace;
}

ShellBound check_shell_bound(const AmfTrace& trace, const Potential& pot,
                             const DiagonalGaussian& g, double p, std::uint64_t seed) {
  ShellBound out;
  out.lower_bound_m = pot.lower_bound();
  out.lipschitz_1 = lipschitz_estimate(pot, 1.0, p, 4000, seed);
  out.k_theoretical = 0.5 * std::exp(out.lower_bound_m - out.lipschitz_1);
  out.k_empirical = std::numeric_limits<double>::infinity();
  for (const AmfRecord& rec : trace.records) {
    double lo = rec.prior_ratio_to_zero.value - 3.0 * rec.prior_ratio_to_zero.std_error;
    out.k_empirical = std::min(out.k_empirical, lo);
  }
  out.holds = trace.records.empty() ? false : out.k_empirical >= out.k_theoretical;
  return out;
}

std::vector<OmLimitRow> verify_om_limit(const DiagonalGaussian& g, const Potential& pot,
                                        const PriorSpec& prior, const Vec& z1,
                                        const Vec& z2, const Vec& deltas, double p,
                                        std::size_t n, std::uint64_t seed) {
  if (z1.size() != g.dim() || z2.size() != g.dim())
    throw std::invalid_argument("verify_om_limit: center dimension mismatch");
  double target = std::exp(om_value(pot, prior, z2) - om_value(pot, prior, z1));
  std::vector<OmLimitRow> rows;
  for (std::size_t m = 0; m < deltas.size(); ++m) {
    OmLimitRow row;
    row.delta = deltas[m];
    row.target = target;
    if (g.dim() == 1) {
      double num = posterior_mass_quadrature_1d(g, pot, z1[0], deltas[m]);
      double den = posterior_mass_quadrature_1d(g, pot, z2[0], deltas[m]);
      row.ratio = num / den;
      row.flagged = !(den > 0.0);
    } else {
      BallMassEstimate est =
          posterior_ball_ratio_uniform(g, pot, z1, z2, deltas[m], p, n, seed + m);
      row.ratio = est.value;
      row.flagged = est.std_error > 0.2 * std::abs(est.value - target) || !est.reliable;
    }
    row.abs_error = std::abs(row.ratio - target);
    rows.push_back(row);
  }
  return rows;
}

std::vector<VanishingRow> check_vanishing_conditions(const PriorSpec& prior,
                                                     VanishingScenario scenario,
                                                     const DeltaSchedule& schedule,
                                                     double scale, std::size_t n,
                                                     std::uint64_t seed) {
  const std::size_t k = prior.dim();
  DiagonalGaussian g = DiagonalGaussian::from_prior(prior);
  Vec zero(k, 0.0);
  std::vector<VanishingRow> rows;
  for (std::size_t m = 0; m < schedule.size(); ++m) {
    Vec x(k, 0.0);
    switch (scenario) {
      case VanishingScenario::unbounded:
        x[0] = scale * static_cast<double>(m + 1);
        break;
      case VanishingScenario::outside_e_proxy: {
        // growing head of z_j = scale * sigma_j: the Cameron-Martin norm of
        // the head grows linearly in its length
        std::size_t head = std::min(m + 1, k);
        for (std::size_t j = 0; j < head; ++j) x[j] = scale * prior.sigmas[j];
        break;
      }
      case VanishingScenario::weak_not_strong_proxy:
        x[std::min(m, k - 1)] = scale;
        break;
    }
    VanishingRow row;
    row.delta = schedule.deltas[m];
    BallMassEstimate est =
        prior_ball_ratio_uniform(g, x, zero, row.delta, prior.p, n, seed + m);
    row.ratio = est.value;
    // truncation index 1: the whole vector counts as tail, so the bound is
    // sensitive to escape in any coordinate
    row.bound = prior.p == 2.0 ? hilbert_ratio_bound(prior, x, row.delta, 1)
                               : lp_ratio_bound(prior, x, row.delta, 0, 0.5);
    row.below_floor = row.ratio < 1e-8;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace maplab
