#include "maplab/smallball.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maplab/rng.hpp"

namespace maplab {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_interval_mass(double lo, double hi, double sigma) {
  if (hi <= lo) return 0.0;
  return normal_cdf(hi / sigma) - normal_cdf(lo / sigma);
}

double normal_pdf(double x, double sigma) {
  static const double inv_sqrt_2pi = 0.3989422804014326779399460599344;
  double t = x / sigma;
  return inv_sqrt_2pi / sigma * std::exp(-0.5 * t * t);
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // sample variance
};

MeanVar mean_var(const Vec& v) {
  std::size_t n = v.size();
  CompensatedSum s;
  for (double x : v) s.add(x);
  double m = s.value() / static_cast<double>(n);
  CompensatedSum s2;
  for (double x : v) s2.add((x - m) * (x - m));
  double var = n > 1 ? s2.value() / static_cast<double>(n - 1) : 0.0;
  return {m, var};
}

double covariance(const Vec& a, const Vec& b, double ma, double mb) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add((a[i] - ma) * (b[i] - mb));
  return a.size() > 1 ? s.value() / static_cast<double>(a.size() - 1) : 0.0;
}

double effective_sample_size(const Vec& w) {
  CompensatedSum s1, s2;
  for (double x : w) {
    s1.add(x);
    s2.add(x * x);
  }
  double denom = s2.value();
  if (denom <= 0.0) return 0.0;
  return s1.value() * s1.value() / denom;
}

// Ratio of means of per-sample values (common random numbers); std error by
// the delta method on the log-ratio, including the covariance term.
BallMassEstimate ratio_from_samples(const Vec& num, const Vec& den,
                                    EstimateMethod method) {
  std::size_t n = num.size();
  MeanVar mn = mean_var(num);
  MeanVar md = mean_var(den);
  BallMassEstimate out;
  out.n_samples = n;
  out.method = method;
  if (md.mean <= 0.0 || mn.mean < 0.0) {
    out.value = 0.0;
    out.std_error = std::numeric_limits<double>::infinity();
    out.reliable = false;
    return out;
  }
  out.value = mn.mean / md.mean;
  double cov = covariance(num, den, mn.mean, md.mean);
  double var_log = (mn.var / (mn.mean * mn.mean) + md.var / (md.mean * md.mean) -
                    2.0 * cov / (mn.mean * md.mean)) /
                   static_cast<double>(n);
  var_log = std::max(var_log, 0.0);
  out.std_error = out.value * std::sqrt(var_log);
  out.reliable = effective_sample_size(den) >= 100.0;
  return out;
}

// log of the Gaussian density ratio at the shifted point: phi(u+c)/phi(u) =
// exp(-1/2 |c|_E^2 - <c, u>_E). Turns a centred draw u into an estimate of
// the integrand at c + u, so E[1_B(u) w(u) f(c+u)] integrates f over B(c).
double shift_log_weight(const DiagonalGaussian& g, const Vec& c, const Vec& u) {
  CompensatedSum cross;
  for (std::size_t j = 0; j < g.dim(); ++j)
    cross.add(c[j] * u[j] / (g.sigmas[j] * g.sigmas[j]));
  return -0.5 * g.cm_norm_sq(c) - cross.value();
}

void check_query(const DiagonalGaussian& g, const BallQuery& q) {
  if (q.center.size() != g.dim())
    throw std::invalid_argument("ball query: dimension mismatch");
  if (!(q.delta > 0.0)) throw std::invalid_argument("ball query: delta must be positive");
}

}  // namespace

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::naive_mc: return "naive_mc";
    case EstimateMethod::cm_shifted_mc: return "cm_shifted_mc";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::uniform_is: return "uniform_is";
  }
  return "unknown";
}

BallQuery BallQuery::make(Vec center, double delta, double p) {
  if (!(delta > 0.0)) throw std::invalid_argument("ball query: delta must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("ball query: p must be >= 1");
  return BallQuery{std::move(center), delta, p};
}

double lp_ball_volume(std::size_t dim, double p, double delta) {
  double k = static_cast<double>(dim);
  double log_vol = k * std::log(2.0) + k * std::lgamma(1.0 + 1.0 / p) -
                   std::lgamma(1.0 + k / p) + k * std::log(delta);
  return std::exp(log_vol);
}

Vec uniform_in_lp_ball(std::size_t dim, double p, double delta, std::uint64_t seed,
                       std::uint64_t index) {
  // Barthe-Guedon-Mendelson-Naor: g_j ~ density prop. to exp(-|t|^p), e ~ Exp(1),
  // then delta * g / (sum |g_j|^p + e)^{1/p} is uniform in the delta-ball.
  Vec g(dim);
  CompensatedSum pow_sum;
  for (std::size_t j = 0; j < dim; ++j) {
    StreamRng rng(seed, index, j);
    double w = rng.gamma(1.0 / p);  // |g|^p ~ Gamma(1/p)
    double mag = std::pow(w, 1.0 / p);
    g[j] = (rng.uniform() < 0.5) ? -mag : mag;
    pow_sum.add(w);
  }
  StreamRng tail_rng(seed, index, dim);
  double denom = std::pow(pow_sum.value() + tail_rng.exponential(), 1.0 / p);
  for (std::size_t j = 0; j < dim; ++j) g[j] = delta * g[j] / denom;
  return g;
}

BallMassEstimate ball_mass_mc(const DiagonalGaussian& g, const BallQuery& q,
                              std::size_t n, std::uint64_t seed) {
  check_query(g, q);
  if (n < 1000) throw std::invalid_argument("ball_mass_mc: need n >= 1000");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = sample_point(g, seed, i);
    if (lp_norm(sub(x, q.center), q.p) < q.delta) ++hits;
  }
  BallMassEstimate out;
  out.value = static_cast<double>(hits) / static_cast<double>(n);
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(n));
  out.n_samples = n;
  out.method = EstimateMethod::naive_mc;
  out.reliable = hits >= 100;
  return out;
}

BallMassEstimate ball_mass_shifted(const DiagonalGaussian& g, const BallQuery& q,
                                   std::size_t n, std::uint64_t seed) {
  check_query(g, q);
  if (n < 1000) throw std::invalid_argument("ball_mass_shifted: need n >= 1000");
  Vec w(n, 0.0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = sample_point(g, seed, i);
    if (lp_norm(u, q.p) < q.delta) {
      w[i] = std::exp(shift_log_weight(g, q.center, u));
      ++hits;
    }
  }
  MeanVar mv = mean_var(w);
  BallMassEstimate out;
  out.value = mv.mean;
  out.std_error = std::sqrt(mv.var / static_cast<double>(n));
  out.n_samples = n;
  out.method = EstimateMethod::cm_shifted_mc;
  out.reliable = effective_sample_size(w) >= 100.0 && hits >= 100;
  return out;
}

BallMassEstimate ball_mass_quadrature(const DiagonalGaussian& g, const BallQuery& q) {
  check_query(g, q);
  const std::size_t dim = g.dim();
  if (dim > 3) throw std::invalid_argument("ball_mass_quadrature: dim must be <= 3");
  const double delta = q.delta;
  const double p = q.p;
  const Vec& c = q.center;
  double value = 0.0;
  if (dim == 1) {
    value = normal_interval_mass(c[0] - delta, c[0] + delta, g.sigmas[0]);
  } else if (dim == 2) {
    auto f = [&](double t) {
      double r = std::pow(std::max(std::pow(delta, p) - std::pow(std::abs(t - c[0]), p), 0.0),
                          1.0 / p);
      return normal_pdf(t, g.sigmas[0]) *
             normal_interval_mass(c[1] - r, c[1] + r, g.sigmas[1]);
    };
    value = GK::integrate(f, c[0] - delta, c[0] + delta, 15, 1e-10);
  } else {
    auto f = [&](double t1) {
      double rem1 = std::pow(delta, p) - std::pow(std::abs(t1 - c[0]), p);
      if (rem1 <= 0.0) return 0.0;
      double r1 = std::pow(rem1, 1.0 / p);
      auto inner = [&](double t2) {
        double rem2 = rem1 - std::pow(std::abs(t2 - c[1]), p);
        if (rem2 <= 0.0) return 0.0;
        double r2 = std::pow(rem2, 1.0 / p);
        return normal_pdf(t2, g.sigmas[1]) *
               normal_interval_mass(c[2] - r2, c[2] + r2, g.sigmas[2]);
      };
      return normal_pdf(t1, g.sigmas[0]) *
             GK::integrate(inner, c[1] - r1, c[1] + r1, 15, 1e-11);
    };
    value = GK::integrate(f, c[0] - delta, c[0] + delta, 15, 1e-10);
  }
  BallMassEstimate out;
  out.value = value;
  out.std_error = 1e-8;  // declared error budget
  out.n_samples = 0;
  out.method = EstimateMethod::quadrature;
  return out;
}

BallMassEstimate ball_mass_uniform(const DiagonalGaussian& g, const BallQuery& q,
                                   std::size_t n, std::uint64_t seed) {
  check_query(g, q);
  double vol = lp_ball_volume(g.dim(), q.p, q.delta);
  Vec vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = uniform_in_lp_ball(g.dim(), q.p, q.delta, seed, i);
    vals[i] = vol * std::exp(log_density(g, add(q.center, u)));
  }
  MeanVar mv = mean_var(vals);
  BallMassEstimate out;
  out.value = mv.mean;
  out.std_error = std::sqrt(mv.var / static_cast<double>(n));
  out.n_samples = n;
  out.method = EstimateMethod::uniform_is;
  return out;
}

BallMassEstimate prior_ball_ratio(const DiagonalGaussian& g, const Vec& w, const Vec& z,
                                  double delta, double p, std::size_t n,
                                  std::uint64_t seed) {
  Vec num(n, 0.0), den(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = sample_point(g, seed, i);
    if (lp_norm(u, p) < delta) {
      num[i] = std::exp(shift_log_weight(g, w, u));
      den[i] = std::exp(shift_log_weight(g, z, u));
    }
  }
  return ratio_from_samples(num, den, EstimateMethod::cm_shifted_mc);
}

BallMassEstimate prior_ball_ratio_uniform(const DiagonalGaussian& g, const Vec& w,
                                          const Vec& z, double delta, double p,
                                          std::size_t n, std::uint64_t seed) {
  Vec ln(n), ld(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = uniform_in_lp_ball(g.dim(), p, delta, seed, i);
    ln[i] = log_density(g, add(w, u));
    ld[i] = log_density(g, add(z, u));
  }
  double a = *std::max_element(ln.begin(), ln.end());
  double b = *std::max_element(ld.begin(), ld.end());
  Vec num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    num[i] = std::exp(ln[i] - a);
    den[i] = std::exp(ld[i] - b);
  }
  BallMassEstimate out = ratio_from_samples(num, den, EstimateMethod::uniform_is);
  double log_scale = a - b;
  out.value *= std::exp(log_scale);
  out.std_error *= std::exp(log_scale);
  return out;
}

BallMassEstimate posterior_ball_ratio(const DiagonalGaussian& g, const Potential& pot,
                                      const Vec& w, const Vec& z, double delta,
                                      double p, std::size_t n, std::uint64_t seed) {
  Vec num(n, 0.0), den(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = sample_point(g, seed, i);
    if (lp_norm(u, p) < delta) {
      num[i] = std::exp(shift_log_weight(g, w, u) - pot(add(w, u)));
      den[i] = std::exp(shift_log_weight(g, z, u) - pot(add(z, u)));
    }
  }
  return ratio_from_samples(num, den, EstimateMethod::cm_shifted_mc);
}

BallMassEstimate posterior_ball_ratio_uniform(const DiagonalGaussian& g,
                                              const Potential& pot, const Vec& w,
                                              const Vec& z, double delta, double p,
                                              std::size_t n, std::uint64_t seed) {
  Vec ln(n), ld(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = uniform_in_lp_ball(g.dim(), p, delta, seed, i);
    ln[i] = log_density(g, add(w, u)) - pot(add(w, u));
    ld[i] = log_density(g, add(z, u)) - pot(add(z, u));
  }
  double a = *std::max_element(ln.begin(), ln.end());
  double b = *std::max_element(ld.begin(), ld.end());
  Vec num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    num[i] = std::exp(ln[i] - a);
    den[i] = std::exp(ld[i] - b);
  }
  BallMassEstimate out = ratio_from_samples(num, den, EstimateMethod::uniform_is);
  double log_scale = a - b;
  out.value *= std::exp(log_scale);
  out.std_error *= std::exp(log_scale);
  return out;
}

double posterior_mass_quadrature_1d(const DiagonalGaussian& g, const Potential& pot,
                                    double center, double delta) {
  if (g.dim() != 1)
    throw std::invalid_argument("posterior_mass_quadrature_1d: dim must be 1");
  auto f = [&](double u) {
    return std::exp(-pot(Vec{u})) * normal_pdf(u, g.sigmas[0]);
  };
  return GK::integrate(f, center - delta, center + delta, 15, 1e-10);
}

double hilbert_ratio_bound(const PriorSpec& prior, const Vec& z, double delta,
                           std::size_t n_index) {
  if (prior.p != 2.0) throw std::invalid_argument("hilbert_ratio_bound: requires p = 2");
  if (n_index < 1 || n_index > prior.dim())
    throw std::invalid_argument("hilbert_ratio_bound: n_index out of range");
  double sigma_n = prior.sigmas[n_index - 1];
  double a_n = 1.0 / (sigma_n * sigma_n);
  double tail_norm = lp_norm(project_tail(z, n_index - 1), 2.0);
  double arg = (tail_norm - delta) * (tail_norm - delta) - delta * delta;
  return std::exp(-0.5 * a_n * arg);
}

double lp_ratio_bound(const PriorSpec& prior, const Vec& z, double delta,
                      std::size_t k_index, double gamma) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("lp_ratio_bound: requires 0 < delta < 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("lp_ratio_bound: gamma must be positive");
  if (k_index >= prior.dim())
    throw std::invalid_argument("lp_ratio_bound: k_index must be < dim");
  double alpha = prior.alpha();
  double q = prior.q();
  double S = prior.S();
  double sigma_next = prior.sigmas[k_index];  // sigma_{k+1}, zero-based storage
  double tail_norm = lp_norm(project_tail(z, k_index), prior.p);
  // (||P_k z||_p - delta)^alpha, clamped at 0 where the shifted ball may
  // touch the origin (the bound is vacuous there anyway)
  double shifted = std::pow(std::max(tail_norm - delta, 0.0), alpha);
  double arg = shifted - std::pow(gamma, alpha) * std::pow(S, alpha) -
               std::pow(delta, alpha);
  double rate = std::pow(gamma, 2.0 - alpha) / (4.0 * q * std::pow(sigma_next, alpha));
  return std::exp(-rate * arg);
}

AndersonResult anderson_check(const DiagonalGaussian& g, const BallQuery& q,
                              std::size_t n, std::uint64_t seed) {
  check_query(g, q);
  Vec zero(g.dim(), 0.0);
  // common random numbers: same draws test both balls
  Vec diff(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = sample_point(g, seed, i);
    double at_center = lp_norm(sub(x, q.center), q.p) < q.delta ? 1.0 : 0.0;
    double at_zero = lp_norm(x, q.p) < q.delta ? 1.0 : 0.0;
    diff[i] = at_center - at_zero;
  }
  MeanVar mv = mean_var(diff);
  AndersonResult out;
  out.margin = mv.mean;
  out.combined_se = std::sqrt(mv.var / static_cast<double>(n));
  out.holds = out.margin <= 3.0 * out.combined_se;
  return out;
}

}  // namespace maplab
