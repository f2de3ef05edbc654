#include "maplab/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maplab {

PriorSpec PriorSpec::make(double p, Vec sigmas) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("prior.p: must be finite and >= 1");
  if (sigmas.empty())
    throw std::invalid_argument("prior.sigmas: must be non-empty");
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    if (!(sigmas[j] > 0.0) || !std::isfinite(sigmas[j]))
      throw std::invalid_argument("prior.sigmas: entries must be positive and finite");
    if (j > 0 && sigmas[j] > sigmas[j - 1])
      throw std::invalid_argument("prior.sigmas: must be non-increasing");
  }
  return PriorSpec{p, std::move(sigmas)};
}

PriorSpec PriorSpec::from_law(double p, double c, double s, std::size_t k) {
  if (!(c > 0.0)) throw std::invalid_argument("prior.sigma_law.c: must be positive");
  if (!(s * p > 1.0))
    throw std::invalid_argument("prior.sigma_law: need s*p > 1 for a summable law");
  if (k == 0) throw std::invalid_argument("prior.sigma_law.k: must be positive");
  Vec sigmas(k);
  for (std::size_t j = 0; j < k; ++j)
    sigmas[j] = c * std::pow(static_cast<double>(j + 1), -s);
  return make(p, std::move(sigmas));
}

double PriorSpec::alpha() const { return std::min(p, 2.0); }

double PriorSpec::q() const { return std::max(p, 2.0 * (p - 1.0) * (p - 1.0)); }

double PriorSpec::S() const {
  CompensatedSum acc;
  for (double s : sigmas) acc.add(std::pow(s, p));
  return std::pow(acc.value(), 1.0 / p);
}

double PriorSpec::law_tail_bound(double p, double c, double s, std::size_t k) {
  // sum_{j>k} (c j^{-s})^p <= c^p * k^{1-sp} / (sp - 1), integral comparison
  double sp = s * p;
  return std::pow(c, p) * std::pow(static_cast<double>(k), 1.0 - sp) / (sp - 1.0);
}

double lp_norm(const Vec& x, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("lp_norm: p must be finite and >= 1");
  CompensatedSum acc;
  double scale = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("lp_norm: non-finite coordinate");
    scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return 0.0;
  for (double v : x) acc.add(std::pow(std::abs(v) / scale, p));
  return scale * std::pow(acc.value(), 1.0 / p);
}

double cm_norm_sq(const Vec& x, const PriorSpec& prior) {
  if (x.size() != prior.dim())
    throw std::invalid_argument("cm_norm_sq: dimension mismatch");
  CompensatedSum acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double r = x[j] / prior.sigmas[j];
    acc.add(r * r);
  }
  return acc.value();
}

// Projections keep the ambient dimension (zeroed complement), so
// head + tail = identity coordinate-wise.
Vec project_head(const Vec& x, std::size_t k) {
  if (k > x.size()) throw std::out_of_range("project_head: k > dim");
  Vec r(x.size(), 0.0);
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), r.begin());
  return r;
}

Vec project_tail(const Vec& x, std::size_t k) {
  if (k > x.size()) throw std::out_of_range("project_tail: k > dim");
  Vec r(x.size(), 0.0);
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(k), x.end(),
            r.begin() + static_cast<std::ptrdiff_t>(k));
  return r;
}

Vec project_band(const Vec& x, std::size_t k, std::size_t K) {
  if (k > K || K > x.size()) throw std::out_of_range("project_band: need k <= K <= dim");
  Vec r(x.size(), 0.0);
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(k),
            x.begin() + static_cast<std::ptrdiff_t>(K),
            r.begin() + static_cast<std::ptrdiff_t>(k));
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(const Vec& a, double t) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

}  // namespace maplab
