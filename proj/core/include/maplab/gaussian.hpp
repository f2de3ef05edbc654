#pragma once

#include <cstdint>
#include <vector>

#include "maplab/sequence.hpp"

namespace maplab {

// Centred Gaussian product measure with diagonal covariance diag(sigma_j^2).
// Unlike PriorSpec, the sigmas here need not be ordered (precision-modified
// measures may reorder them).
struct DiagonalGaussian {
  Vec sigmas;

  static DiagonalGaussian make(Vec sigmas);
  static DiagonalGaussian from_prior(const PriorSpec& prior);

  std::size_t dim() const { return sigmas.size(); }
  double cm_norm_sq(const Vec& x) const;
};

// Diagonal precision extraction weights gamma_j, each strictly below
// sigma_j^{-2} so the modified precision stays positive.
struct GammaDiagonal {
  Vec entries;

  static GammaDiagonal make(Vec entries, const DiagonalGaussian& g);
};

struct SampleBatch {
  std::vector<Vec> points;
  std::uint64_t seed = 0;
};

// Draw i-th sample of the batch; coordinate j comes from stream (seed, i, j).
Vec sample_point(const DiagonalGaussian& g, std::uint64_t seed, std::uint64_t index);
SampleBatch sample(const DiagonalGaussian& g, std::size_t n, std::uint64_t seed);

double log_density(const DiagonalGaussian& g, const Vec& x);

// log of d mu(.-h)/d mu at u:  -1/2 |h|_E^2 + sum_j h_j u_j / sigma_j^2
double cm_shift_log_ratio(const DiagonalGaussian& g, const Vec& h, const Vec& u);

struct NormExtraction {
  double log_ratio;           // log d mu / d nu at u
  DiagonalGaussian modified;  // nu, variances (sigma_j^{-2} - gamma_j)^{-1}
};

NormExtraction normextraction_log_ratio(const DiagonalGaussian& g,
                                        const GammaDiagonal& gamma, const Vec& u);

}  // namespace maplab
