#include <doctest.h>

#include <cmath>

#include "maplab/amf.hpp"

using maplab::Vec;

TEST_CASE("delta schedules validate shape") {
  auto dyadic = maplab::DeltaSchedule::dyadic(4);
  CHECK(dyadic.deltas == Vec{0.5, 0.25, 0.125, 0.0625});
  CHECK(dyadic.eps == dyadic.deltas);
  CHECK_THROWS_AS(maplab::DeltaSchedule::make({0.5, 0.5}, {0.1, 0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(maplab::DeltaSchedule::make({0.5, 0.25}, {0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(maplab::DeltaSchedule::make({0.5}, {1.5}), std::invalid_argument);
}

TEST_CASE("zero potential family stays near the origin") {
  auto prior = maplab::PriorSpec::make(2.0, {1.0, 0.5});
  auto g = maplab::DiagonalGaussian::from_prior(prior);
  auto pot = maplab::Potential::zero(2);
  maplab::AmfOptions opts;
  opts.candidates = 8;
  opts.n_samples = 20000;
  auto trace = maplab::build_amf(g, pot, prior, maplab::DeltaSchedule::dyadic(4), opts, 5);
  REQUIRE(trace.records.size() == 4);
  // centred balls maximize prior mass; final center within the refinement scale
  const auto& last = trace.records.back();
  CHECK(maplab::lp_norm(last.center, 2.0) < last.delta);
  CHECK(last.achieved_ratio.value == 1.0);
}

TEST_CASE("single-delta schedule produces a valid one-record trace") {
  auto prior = maplab::PriorSpec::make(2.0, {1.0});
  auto g = maplab::DiagonalGaussian::from_prior(prior);
  maplab::AmfOptions opts;
  opts.candidates = 4;
  opts.n_samples = 5000;
  auto sched = maplab::DeltaSchedule::make({0.25}, {0.25});
  auto trace = maplab::build_amf(g, maplab::Potential::zero(1), prior, sched, opts, 9);
  CHECK(trace.records.size() == 1);
  CHECK(std::isfinite(trace.records[0].prior_ratio_to_zero.value));
}

TEST_CASE("ratio limit rows approach the functional difference in 1d") {
  auto prior = maplab::PriorSpec::make(2.0, {1.0});
  auto g = maplab::DiagonalGaussian::from_prior(prior);
  maplab::Matrix a(1, 1);
  a << 1.0;
  auto pot = maplab::Potential::gaussian_misfit(maplab::ForwardModel::make_linear(a),
                                                {2.0}, maplab::Matrix::Identity(1, 1));
  auto rows = maplab::verify_om_limit(g, pot, prior, {0.0}, {1.0},
                                      {0.1, 0.05, 0.025}, 2.0, 0, 0);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.target == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(rows[2].abs_error <= rows[1].abs_error);
  CHECK(rows[1].abs_error <= rows[0].abs_error);
  CHECK(rows[2].abs_error / rows[2].target < 0.02);
}

TEST_CASE("escape scenarios produce vanishing dominated ratios") {
  auto prior = maplab::PriorSpec::from_law(2.0, 1.0, 0.6, 8);
  auto sched = maplab::DeltaSchedule::dyadic(6);
  for (auto sc : {maplab::VanishingScenario::unbounded,
                  maplab::VanishingScenario::outside_e_proxy,
                  maplab::VanishingScenario::weak_not_strong_proxy}) {
    auto rows = maplab::check_vanishing_conditions(prior, sc, sched, 1.0, 50000, 13);
    REQUIRE(rows.size() == 6);
    for (std::size_t m = 3; m < rows.size(); ++m)
      CHECK(rows[m].ratio < rows[m - 1].ratio);
    for (const auto& r : rows) CHECK(r.ratio <= r.bound * (1.0 + 1e-9));
  }
}
