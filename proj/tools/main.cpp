// Experiment runner: estimation, verification, and figure-data subcommands
// over a single JSON config. Deterministic given (config, seed): re-runs
// produce byte-identical files.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>

#include "maplab/amf.hpp"
#include "maplab/config.hpp"
#include "maplab/convexify.hpp"
#include "maplab/io.hpp"
#include "maplab/rng.hpp"
#include "maplab/smallball.hpp"

namespace {

using maplab::Vec;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

json to_json(const Vec& v) { return json(v); }

json check_record(const std::string& id, const std::string& status, double observed,
                  double expected, double tolerance, const std::string& property) {
  return json{{"check_id", id},     {"status", status},       {"observed", observed},
              {"expected", expected}, {"tolerance", tolerance}, {"property", property}};
}

struct ReportBuilder {
  json checks = json::array();
  bool any_fail = false;

  void add(const std::string& id, bool pass, double observed, double expected,
           double tolerance, const std::string& property, bool indeterminate = false) {
    std::string status = indeterminate ? "indeterminate" : (pass ? "pass" : "fail");
    if (!indeterminate && !pass) any_fail = true;
    checks.push_back(check_record(id, status, observed, expected, tolerance, property));
  }
};

void write_report(const maplab::ExperimentConfig& cfg, const std::string& name,
                  const json& doc) {
  std::filesystem::path path =
      std::filesystem::path(cfg.output.directory) / name;
  maplab::write_atomic(path, doc.dump(2) + "\n");
}

maplab::DeltaSchedule schedule_from(const maplab::RunParams& run) {
  return maplab::DeltaSchedule::make(run.deltas, run.eps);
}

// ---------------------------------------------------------------------------

int cmd_map(const maplab::ExperimentConfig& cfg) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for map");
  maplab::Potential pot = cfg.make_potential();
  Vec x0(cfg.prior->dim(), 0.0);
  maplab::OmResult res = maplab::minimize_om(pot, *cfg.prior, x0, cfg.run.tolerance, 1000);
  if (!std::isfinite(res.value)) return kExitNumerical;
  json doc{{"command", "map"},
           {"minimizer", to_json(res.minimizer)},
           {"value", res.value},
           {"iterations", res.iterations},
           {"grad_norm", res.grad_norm},
           {"converged", res.converged}};
  write_report(cfg, "map_result.json", doc);
  return res.converged ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

void verify_om_limit(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for om-limit");
  if (cfg.run.z1.empty() || cfg.run.z2.empty())
    throw maplab::ConfigError("run.z1: om-limit requires run.z1 and run.z2");
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(*cfg.prior);
  maplab::Potential pot = cfg.make_potential();
  auto rows = maplab::verify_om_limit(g, pot, *cfg.prior, cfg.run.z1, cfg.run.z2,
                                      cfg.run.deltas, cfg.prior->p, cfg.run.n_samples,
                                      cfg.run.seed);
  const std::string prop = "small-ball mass ratio approaches the functional-difference limit";
  for (std::size_t m = 0; m < rows.size(); ++m) {
    rb.add("om-limit-delta-" + std::to_string(m), true, rows[m].ratio, rows[m].target,
           0.0, prop, /*indeterminate=*/true);
  }
  bool trend = true;
  for (std::size_t m = 1; m < rows.size(); ++m)
    if (rows[m].abs_error > rows[m - 1].abs_error * 1.1 + 1e-12) trend = false;
  rb.add("om-limit-trend", trend, rows.back().abs_error, 0.0, 0.0,
         "absolute error non-increasing along the radius schedule");
  double rel = rows.back().abs_error / std::abs(rows.back().target);
  rb.add("om-limit-final", rel <= cfg.run.tolerance, rows.back().ratio,
         rows.back().target, cfg.run.tolerance, prop, rows.back().flagged);
}

void verify_bounds(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for bounds");
  const maplab::PriorSpec& prior = *cfg.prior;
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(prior);
  const std::size_t k = prior.dim();
  const std::size_t queries = 20;
  for (std::size_t t = 0; t < queries; ++t) {
    maplab::StreamRng rng(cfg.run.seed, t, 1u << 20);
    Vec z(k);
    for (std::size_t j = 0; j < k; ++j) z[j] = rng.uniform(-2.0, 2.0);
    double delta = rng.uniform(0.05, 0.5);
    Vec zero(k, 0.0);
    maplab::BallMassEstimate est = maplab::prior_ball_ratio(
        g, z, zero, delta, prior.p, cfg.run.n_samples, cfg.run.seed + 7919 * t);
    double bound;
    std::string prop;
    if (prior.p == 2.0) {
      std::size_t n_index = 1 + (t % k);
      bound = maplab::hilbert_ratio_bound(prior, z, delta, n_index);
      prop = "shifted-to-centred ratio below the Hilbert tail bound";
    } else {
      std::size_t k_index = t % k;
      bound = maplab::lp_ratio_bound(prior, z, delta, k_index, rng.uniform(0.2, 1.0));
      prop = "shifted-to-centred ratio below the sequence-space tail bound";
    }
    bool pass = est.value <= bound + 3.0 * est.std_error;
    rb.add("ratio-bound-" + std::to_string(t), pass, est.value, bound,
           3.0 * est.std_error, prop, !est.reliable && pass);
  }
}

void verify_convexity(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.convexify) throw maplab::ConfigError("convexify: required for convexity");
  const maplab::ConvexifySpec& spec = *cfg.convexify;
  auto cert = maplab::convexity_certificate(spec, cfg.run.n_samples, cfg.run.seed);
  rb.add("convexity", cert.violations == 0, static_cast<double>(cert.violations), 0.0,
         1e-9, "surrogate difference is midpoint-convex");
  auto nn = maplab::nonnegativity_certificate(spec, 512, cfg.run.seed);
  rb.add("nonnegativity", nn.min_value >= -1e-9, nn.min_value, 0.0, 1e-9,
         "surrogate difference is non-negative");
  std::size_t bad = 0;
  for (std::size_t t = 0; t < 10000; ++t) {
    maplab::StreamRng rng(cfg.run.seed, t, 1u << 21);
    Vec x(spec.dim());
    for (std::size_t j = 0; j < spec.dim(); ++j) x[j] = rng.uniform(-10.0, 10.0);
    auto s = maplab::sandwich_check(spec, x);
    if (!s.lower_ok || !s.upper_ok) ++bad;
  }
  rb.add("sandwich", bad == 0, static_cast<double>(bad), 0.0, 1e-12,
         "smoothed surrogate sandwiched between norm powers");
}

void verify_anderson(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for anderson");
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(*cfg.prior);
  const std::size_t k = g.dim();
  const std::string prop = "centred ball carries at least the mass of any shifted ball";
  for (std::size_t t = 0; t < 50; ++t) {
    maplab::StreamRng rng(cfg.run.seed, t, 1u << 22);
    Vec c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = rng.uniform(-1.5, 1.5);
    double delta = rng.uniform(0.2, 2.0);
    auto q = maplab::BallQuery::make(c, delta, cfg.prior->p);
    auto res = maplab::anderson_check(g, q, cfg.run.n_samples, cfg.run.seed + 104729 * t);
    rb.add("anderson-" + std::to_string(t), res.holds, res.margin, 0.0,
           3.0 * res.combined_se, prop);
    if (k == 1) {
      auto shifted = maplab::ball_mass_quadrature(g, q);
      auto centred = maplab::ball_mass_quadrature(
          g, maplab::BallQuery::make(Vec(1, 0.0), delta, cfg.prior->p));
      rb.add("anderson-quad-" + std::to_string(t),
             shifted.value <= centred.value + 1e-8, shifted.value, centred.value, 1e-8,
             prop);
    }
  }
}

void verify_vanishing(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for vanishing");
  maplab::DeltaSchedule sched = schedule_from(cfg.run);
  maplab::VanishingScenario sc;
  if (cfg.run.scenario == "unbounded")
    sc = maplab::VanishingScenario::unbounded;
  else if (cfg.run.scenario == "outside-cm")
    sc = maplab::VanishingScenario::outside_e_proxy;
  else if (cfg.run.scenario == "escaping-coordinates")
    sc = maplab::VanishingScenario::weak_not_strong_proxy;
  else
    throw maplab::ConfigError(
        "run.scenario: must be unbounded, outside-cm, or escaping-coordinates");
  auto rows = maplab::check_vanishing_conditions(*cfg.prior, sc, sched, cfg.run.scale,
                                                 cfg.run.n_samples, cfg.run.seed);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    bool dominated = rows[m].ratio <= rows[m].bound * (1.0 + 1e-9) || rows[m].below_floor;
    rb.add("vanishing-bound-" + std::to_string(m), dominated, rows[m].ratio,
           rows[m].bound, 0.0, "escape-sequence ratio dominated by the analytic bound",
           rows[m].below_floor);
  }
  std::size_t last4 = rows.size() >= 4 ? rows.size() - 4 : 0;
  bool decreasing = true;
  for (std::size_t m = last4 + 1; m < rows.size(); ++m)
    if (!(rows[m].ratio < rows[m - 1].ratio || rows[m].below_floor)) decreasing = false;
  rb.add("vanishing-trend", decreasing, rows.back().ratio, 0.0, 0.0,
         "escape-sequence ratios decrease toward zero along the schedule");
}

void verify_shell(const maplab::ExperimentConfig& cfg, ReportBuilder& rb) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for shell");
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(*cfg.prior);
  maplab::Potential pot = cfg.make_potential();
  maplab::AmfOptions opts;
  opts.candidates = cfg.run.candidates;
  opts.n_samples = cfg.run.n_samples;
  opts.p = cfg.prior->p;
  auto trace =
      maplab::build_amf(g, pot, *cfg.prior, schedule_from(cfg.run), opts, cfg.run.seed);
  auto shell = maplab::check_shell_bound(trace, pot, g, cfg.prior->p, cfg.run.seed);
  rb.add("shell-bound", shell.holds, shell.k_empirical, shell.k_theoretical, 0.0,
         "family prior-ratios stay above the potential-oscillation constant",
         /*indeterminate=*/!shell.holds);
}

int cmd_verify(const maplab::ExperimentConfig& cfg) {
  if (cfg.verify_which.empty()) throw maplab::ConfigError("verify.which: required");
  ReportBuilder rb;
  if (cfg.verify_which == "om-limit")
    verify_om_limit(cfg, rb);
  else if (cfg.verify_which == "bounds")
    verify_bounds(cfg, rb);
  else if (cfg.verify_which == "convexity")
    verify_convexity(cfg, rb);
  else if (cfg.verify_which == "anderson")
    verify_anderson(cfg, rb);
  else if (cfg.verify_which == "vanishing")
    verify_vanishing(cfg, rb);
  else
    verify_shell(cfg, rb);
  json doc{{"command", "verify"}, {"which", cfg.verify_which}, {"checks", rb.checks}};
  write_report(cfg, "verify_" + cfg.verify_which + ".json", doc);
  return rb.any_fail ? kExitCheckFailure : kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_amf(const maplab::ExperimentConfig& cfg) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for amf");
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(*cfg.prior);
  maplab::Potential pot = cfg.make_potential();
  maplab::AmfOptions opts;
  opts.candidates = cfg.run.candidates;
  opts.n_samples = cfg.run.n_samples;
  opts.p = cfg.prior->p;
  auto trace =
      maplab::build_amf(g, pot, *cfg.prior, schedule_from(cfg.run), opts, cfg.run.seed);
  auto shell = maplab::check_shell_bound(trace, pot, g, cfg.prior->p, cfg.run.seed);
  std::string lines;
  for (const auto& rec : trace.records) {
    json row{{"delta", rec.delta},
             {"eps", rec.eps},
             {"center", to_json(rec.center)},
             {"achieved_ratio", rec.achieved_ratio.value},
             {"achieved_ratio_se", rec.achieved_ratio.std_error},
             {"prior_ratio_to_zero", rec.prior_ratio_to_zero.value},
             {"prior_ratio_to_zero_se", rec.prior_ratio_to_zero.std_error},
             {"distance_to_om", rec.distance_to_om},
             {"indeterminate", rec.indeterminate}};
    lines += row.dump() + "\n";
    if (!std::isfinite(rec.distance_to_om)) return kExitNumerical;
  }
  json summary{{"summary", true},
               {"om_minimizer", to_json(trace.om_minimizer)},
               {"refinement_step", trace.refinement_step},
               {"k_empirical", shell.k_empirical},
               {"k_theoretical", shell.k_theoretical},
               {"lipschitz_1", shell.lipschitz_1},
               {"shell_holds", shell.holds}};
  lines += summary.dump() + "\n";
  maplab::write_atomic(std::filesystem::path(cfg.output.directory) / "amf_trace.jsonl",
                       lines);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_figure(const maplab::ExperimentConfig& cfg) {
  if (!cfg.convexify) throw maplab::ConfigError("convexify: required for figure");
  if (cfg.convexify->dim() != 2)
    throw maplab::ConfigError("convexify.rho: figure requires exactly 2 entries");
  double beta_naive =
      cfg.figure_beta_naive > 0.0 ? cfg.figure_beta_naive : cfg.convexify->beta;
  auto tables = maplab::figure_levelsets(cfg.convexify->p, beta_naive, *cfg.convexify,
                                         cfg.run.grid);
  std::filesystem::path dir(cfg.output.directory);
  maplab::write_atomic(dir / "fig1_left.csv", maplab::levelset_csv(tables, false));
  maplab::write_atomic(dir / "fig1_right.csv", maplab::levelset_csv(tables, true));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sample(const maplab::ExperimentConfig& cfg) {
  if (!cfg.prior) throw maplab::ConfigError("prior: required for sample");
  maplab::DiagonalGaussian g = maplab::DiagonalGaussian::from_prior(*cfg.prior);
  std::string out;
  out.reserve(cfg.run.n_samples * 16);
  for (std::size_t j = 0; j < g.dim(); ++j) {
    if (j) out += ',';
    out += "u" + std::to_string(j + 1);
  }
  out += '\n';
  for (std::size_t i = 0; i < cfg.run.n_samples; ++i) {
    Vec x = maplab::sample_point(g, cfg.run.seed, i);
    for (std::size_t j = 0; j < g.dim(); ++j) {
      if (j) out += ',';
      out += maplab::format_double(x[j]);
      if (!std::isfinite(x[j])) return kExitNumerical;
    }
    out += '\n';
  }
  maplab::write_atomic(std::filesystem::path(cfg.output.directory) / "samples.csv", out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP estimation and small-ball probability laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed_override, "override run.seed");
    sub->add_option("--out", out_override, "override output.directory");
  };
  CLI::App* sub_map = app.add_subcommand("map", "minimize the regularized misfit");
  CLI::App* sub_verify = app.add_subcommand("verify", "run a verification suite");
  CLI::App* sub_amf = app.add_subcommand("amf", "build a maximizing family trace");
  CLI::App* sub_figure = app.add_subcommand("figure", "emit level-set grid data");
  CLI::App* sub_sample = app.add_subcommand("sample", "draw prior samples");
  for (CLI::App* sub : {sub_map, sub_verify, sub_amf, sub_figure, sub_sample})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    maplab::ExperimentConfig cfg = maplab::ExperimentConfig::load(config_path);
    if (seed_override) cfg.run.seed = *seed_override;
    if (out_override) cfg.output.directory = *out_override;
    if (sub_map->parsed()) return cmd_map(cfg);
    if (sub_verify->parsed()) return cmd_verify(cfg);
    if (sub_amf->parsed()) return cmd_amf(cfg);
    if (sub_figure->parsed()) return cmd_figure(cfg);
    return cmd_sample(cfg);
  } catch (const maplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
