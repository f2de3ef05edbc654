#include "maplab/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "maplab/rng.hpp"

namespace maplab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// Margin on the gamma_j < sigma_j^{-2} constraint; keeps modified variances
// finite instead of overflowing right at the boundary.
constexpr double kGammaMargin = 1e-12;
}  // namespace

DiagonalGaussian DiagonalGaussian::make(Vec sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("gaussian: empty sigma list");
  for (double s : sigmas)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("gaussian: sigmas must be positive and finite");
  return DiagonalGaussian{std::move(sigmas)};
}

DiagonalGaussian DiagonalGaussian::from_prior(const PriorSpec& prior) {
  return DiagonalGaussian{prior.sigmas};
}

double DiagonalGaussian::cm_norm_sq(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("cm_norm_sq: dimension mismatch");
  CompensatedSum acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double r = x[j] / sigmas[j];
    acc.add(r * r);
  }
  return acc.value();
}

GammaDiagonal GammaDiagonal::make(Vec entries, const DiagonalGaussian& g) {
  if (entries.size() != g.dim())
    throw std::invalid_argument("gamma: dimension mismatch");
  for (std::size_t j = 0; j < entries.size(); ++j) {
    double aj = 1.0 / (g.sigmas[j] * g.sigmas[j]);
    if (!(entries[j] >= 0.0) || entries[j] > (1.0 - kGammaMargin) * aj)
      throw std::invalid_argument("gamma: entries must satisfy 0 <= gamma_j < sigma_j^{-2}");
  }
  return GammaDiagonal{std::move(entries)};
}

Vec sample_point(const DiagonalGaussian& g, std::uint64_t seed, std::uint64_t index) {
  Vec x(g.dim());
  for (std::size_t j = 0; j < g.dim(); ++j)
    x[j] = g.sigmas[j] * StreamRng(seed, index, j).normal();
  return x;
}

SampleBatch sample(const DiagonalGaussian& g, std::size_t n, std::uint64_t seed) {
  SampleBatch batch;
  batch.seed = seed;
  batch.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.points.push_back(sample_point(g, seed, i));
  return batch;
}

double log_density(const DiagonalGaussian& g, const Vec& x) {
  double log_norm = 0.0;
  for (double s : g.sigmas) log_norm += std::log(s) + 0.5 * std::log(kTwoPi);
  return -0.5 * g.cm_norm_sq(x) - log_norm;
}

double cm_shift_log_ratio(const DiagonalGaussian& g, const Vec& h, const Vec& u) {
  if (h.size() != g.dim() || u.size() != g.dim())
    throw std::invalid_argument("cm_shift_log_ratio: dimension mismatch");
  CompensatedSum cross;
  for (std::size_t j = 0; j < g.dim(); ++j)
    cross.add(h[j] * u[j] / (g.sigmas[j] * g.sigmas[j]));
  return -0.5 * g.cm_norm_sq(h) + cross.value();
}

NormExtraction normextraction_log_ratio(const DiagonalGaussian& g,
                                        const GammaDiagonal& gamma, const Vec& u) {
  if (gamma.entries.size() != g.dim() || u.size() != g.dim())
    throw std::invalid_argument("normextraction: dimension mismatch");
  Vec modified_sigmas(g.dim());
  CompensatedSum quad;
  double log_det = 0.0;
  for (std::size_t j = 0; j < g.dim(); ++j) {
    double s2 = g.sigmas[j] * g.sigmas[j];
    // log(1 - gamma_j sigma_j^2) via log1p; cancels badly near the boundary
    log_det += std::log1p(-gamma.entries[j] * s2);
    modified_sigmas[j] = 1.0 / std::sqrt(1.0 / s2 - gamma.entries[j]);
    quad.add(gamma.entries[j] * u[j] * u[j]);
  }
  NormExtraction out;
  out.log_ratio = -0.5 * quad.value() - 0.5 * log_det;
  out.modified = DiagonalGaussian::make(std::move(modified_sigmas));
  return out;
}

}  // namespace maplab
