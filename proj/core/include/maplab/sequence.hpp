#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace maplab {

using Vec = std::vector<double>;

// Neumaier compensated summation; keeps norm accumulation reproducible.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Truncated diagonal Gaussian prior on a weighted l^p sequence space:
// exponent p >= 1 and standard deviations sigma_1 >= ... >= sigma_k > 0.
struct PriorSpec {
  double p = 2.0;
  Vec sigmas;

  static PriorSpec make(double p, Vec sigmas);
  // sigma_j = c * j^{-s}, j = 1..k; requires s*p > 1 so the series sum
  // sigma_j^p converges.
  static PriorSpec from_law(double p, double c, double s, std::size_t k);

  std::size_t dim() const { return sigmas.size(); }

  double alpha() const;  // min(p, 2)
  double q() const;      // max(p, 2(p-1)^2)
  double S() const;      // (sum_j sigma_j^p)^{1/p}, truncated

  // Upper bound on the omitted tail sum_{j>k} (c j^{-s})^p for a decay-law
  // prior; reported alongside S so the truncation error is visible.
  static double law_tail_bound(double p, double c, double s, std::size_t k);
};

double lp_norm(const Vec& x, double p);
double cm_norm_sq(const Vec& x, const PriorSpec& prior);

Vec project_head(const Vec& x, std::size_t k);
Vec project_tail(const Vec& x, std::size_t k);
Vec project_band(const Vec& x, std::size_t k, std::size_t K);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double t);

}  // namespace maplab
