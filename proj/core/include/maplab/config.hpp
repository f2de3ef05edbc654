#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "maplab/convexify.hpp"
#include "maplab/inverse.hpp"
#include "maplab/sequence.hpp"

namespace maplab {

// Parse failures carry the offending field path, e.g. "prior.sigmas".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunParams {
  std::uint64_t seed = 0;
  std::size_t n_samples = 100000;
  Vec deltas;           // default: dyadic 2^{-m}, m = 1..8
  Vec eps;              // default: equal to deltas
  std::size_t candidates = 32;
  std::size_t grid = 201;
  double tolerance = 1e-6;
  Vec z1, z2;           // centers for ratio-limit runs
  double scale = 1.0;   // escape-sequence amplitude
  std::string scenario = "unbounded";
};

struct OutputParams {
  std::string directory = "out";
};

struct ForwardSpec {
  std::string kind = "zero";  // "zero" | "linear"
  Matrix matrix;              // linear only
  Vec data;
  Matrix noise_prec_sqrt;     // defaults to identity when absent
};

struct ExperimentConfig {
  std::optional<PriorSpec> prior;
  std::optional<ForwardSpec> forward;
  std::optional<ConvexifySpec> convexify;
  double figure_beta_naive = 0.0;  // unsmoothed-penalty coefficient for grids
  RunParams run;
  std::string verify_which;  // om-limit | bounds | convexity | anderson | vanishing | shell
  OutputParams output;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);

  // Misfit potential for the configured forward model; requires prior.
  Potential make_potential() const;
};

}  // namespace maplab
