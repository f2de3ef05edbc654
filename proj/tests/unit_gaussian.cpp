#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "maplab/gaussian.hpp"
#include "maplab/rng.hpp"

using maplab::Vec;

TEST_CASE("sampling is deterministic and order-independent") {
  auto g = maplab::DiagonalGaussian::make({1.0, 0.5, 2.0});
  Vec a = maplab::sample_point(g, 99, 7);
  Vec b = maplab::sample_point(g, 99, 7);
  CHECK(a == b);
  // drawing index 3 never depends on whether indices 0..2 were drawn
  auto batch = maplab::sample(g, 10, 99);
  CHECK(batch.points[7] == a);
  Vec c = maplab::sample_point(g, 100, 7);
  CHECK(a != c);
}

TEST_CASE("sample moments match the covariance") {
  auto g = maplab::DiagonalGaussian::make({1.0, 0.25});
  const std::size_t n = 200000;
  double m1 = 0.0, v0 = 0.0, v1 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = maplab::sample_point(g, 31, i);
    m1 += x[0];
    v0 += x[0] * x[0];
    v1 += x[1] * x[1];
    cross += x[0] * x[1];
  }
  double dn = static_cast<double>(n);
  CHECK(std::abs(m1 / dn) < 0.01);
  CHECK(v0 / dn == doctest::Approx(1.0).epsilon(0.02));
  CHECK(v1 / dn == doctest::Approx(0.0625).epsilon(0.02));
  CHECK(std::abs(cross / dn) < 0.01);
}

TEST_CASE("log_density oracle in 1d") {
  auto g = maplab::DiagonalGaussian::make({2.0});
  // -x^2/(2 sigma^2) - log(sigma sqrt(2 pi))
  double expected = -1.0 / 8.0 - std::log(2.0 * std::sqrt(2.0 * M_PI));
  CHECK(maplab::log_density(g, {1.0}) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("shift weight reproduces translated expectations") {
  // E_mu[ w_h(u) f(u) ] = E_mu[ f(u + h) ] for the shift density w_h
  auto g = maplab::DiagonalGaussian::make({1.0, 0.5});
  Vec h{0.7, -0.3};
  const std::size_t n = 200000;
  double lhs = 0.0, rhs = 0.0;
  auto f = [](const Vec& u) { return std::cos(u[0]) + u[1] * u[1]; };
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = maplab::sample_point(g, 77, i);
    lhs += std::exp(maplab::cm_shift_log_ratio(g, h, u)) * f(u);
    rhs += f(maplab::add(u, h));
  }
  CHECK(lhs / static_cast<double>(n) ==
        doctest::Approx(rhs / static_cast<double>(n)).epsilon(0.02));
}

TEST_CASE("cm_shift_log_ratio closed form") {
  auto g = maplab::DiagonalGaussian::make({1.0});
  // -h^2/2 + h u with h = 1, u = 2
  CHECK(maplab::cm_shift_log_ratio(g, {1.0}, {2.0}) ==
        doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("precision extraction oracle") {
  // gamma = 1/2, sigma = 1, u = 1: log ratio = -1/4 - (1/2) log(1/2)
  auto g = maplab::DiagonalGaussian::make({1.0});
  auto gamma = maplab::GammaDiagonal::make({0.5}, g);
  auto ext = maplab::normextraction_log_ratio(g, gamma, {1.0});
  CHECK(ext.log_ratio == doctest::Approx(-0.25 + 0.5 * std::log(2.0)).epsilon(1e-14));
  // modified variance (1 - 1/2)^{-1} = 2
  CHECK(ext.modified.sigmas[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("precision extraction is a change of measure") {
  // E_nu[ exp(log dmu/dnu) f ] = E_mu[ f ], checked on f = 1 and f = u^2
  auto g = maplab::DiagonalGaussian::make({1.0});
  auto gamma = maplab::GammaDiagonal::make({0.4}, g);
  auto nu = maplab::normextraction_log_ratio(g, gamma, {0.0}).modified;
  const std::size_t n = 400000;
  double mass = 0.0, second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = maplab::sample_point(nu, 13, i);
    double w = std::exp(maplab::normextraction_log_ratio(g, gamma, u).log_ratio);
    mass += w;
    second += w * u[0] * u[0];
  }
  CHECK(mass / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(second / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma entries at or above the precision are rejected") {
  auto g = maplab::DiagonalGaussian::make({1.0});
  CHECK_THROWS_AS(maplab::GammaDiagonal::make({1.0}, g), std::invalid_argument);
  CHECK_THROWS_AS(maplab::GammaDiagonal::make({1.5}, g), std::invalid_argument);
}

TEST_CASE("stream rng basic distributional sanity") {
  double mean = 0.0, var = 0.0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) {
    maplab::StreamRng rng(5, i, 0);
    double x = rng.normal();
    mean += x;
    var += x * x;
  }
  CHECK(std::abs(mean / static_cast<double>(n)) < 0.02);
  CHECK(var / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.02));
  // gamma(shape) has mean = shape
  double gm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    maplab::StreamRng rng(6, i, 0);
    gm += rng.gamma(0.5);
  }
  CHECK(gm / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.03));
}
