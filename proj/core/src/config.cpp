#include "maplab/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace maplab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

std::size_t get_size(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "must be a non-negative integer");
  return j.get<std::size_t>();
}

Vec get_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Matrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of rows");
  std::size_t cols = 0;
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Vec row = get_vec(j[i], path + "[" + std::to_string(i) + "]");
    if (i == 0)
      cols = row.size();
    else if (row.size() != cols)
      fail(path, "rows must have equal length");
    rows.push_back(std::move(row));
  }
  if (cols == 0) fail(path, "rows must be non-empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return m;
}

PriorSpec parse_prior(const json& j) {
  reject_unknown(j, "prior", {"p", "sigmas", "sigma_law"});
  if (!j.contains("p")) fail("prior.p", "required");
  double p = get_number(j["p"], "prior.p");
  const bool has_list = j.contains("sigmas");
  const bool has_law = j.contains("sigma_law");
  if (has_list == has_law)
    fail("prior", "exactly one of sigmas or sigma_law is required");
  try {
    if (has_list) return PriorSpec::make(p, get_vec(j["sigmas"], "prior.sigmas"));
    const json& law = j["sigma_law"];
    reject_unknown(law, "prior.sigma_law", {"c", "s", "k"});
    for (const char* key : {"c", "s", "k"})
      if (!law.contains(key)) fail(std::string("prior.sigma_law.") + key, "required");
    return PriorSpec::from_law(p, get_number(law["c"], "prior.sigma_law.c"),
                               get_number(law["s"], "prior.sigma_law.s"),
                               get_size(law["k"], "prior.sigma_law.k"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ForwardSpec parse_forward(const json& j) {
  reject_unknown(j, "forward", {"kind", "matrix", "data", "noise_prec_sqrt"});
  ForwardSpec f;
  if (!j.contains("kind")) fail("forward.kind", "required");
  if (!j["kind"].is_string()) fail("forward.kind", "must be a string");
  f.kind = j["kind"].get<std::string>();
  if (f.kind == "zero") {
    reject_unknown(j, "forward", {"kind"});
    return f;
  }
  if (f.kind != "linear") fail("forward.kind", "must be \"zero\" or \"linear\"");
  if (!j.contains("matrix")) fail("forward.matrix", "required for linear models");
  f.matrix = get_matrix(j["matrix"], "forward.matrix");
  if (!j.contains("data")) fail("forward.data", "required for linear models");
  f.data = get_vec(j["data"], "forward.data");
  if (static_cast<Eigen::Index>(f.data.size()) != f.matrix.rows())
    fail("forward.data", "length must equal the matrix row count");
  if (j.contains("noise_prec_sqrt")) {
    f.noise_prec_sqrt = get_matrix(j["noise_prec_sqrt"], "forward.noise_prec_sqrt");
    if (f.noise_prec_sqrt.rows() != f.matrix.rows() ||
        f.noise_prec_sqrt.cols() != f.matrix.rows())
      fail("forward.noise_prec_sqrt", "must be square with side = data length");
  } else {
    f.noise_prec_sqrt = Matrix::Identity(f.matrix.rows(), f.matrix.rows());
  }
  return f;
}

ConvexifySpec parse_convexify(const json& j, double* beta_naive) {
  reject_unknown(j, "convexify", {"p", "rho", "gamma", "beta", "beta_naive"});
  for (const char* key : {"p", "rho", "gamma"})
    if (!j.contains(key)) fail(std::string("convexify.") + key, "required");
  double p = get_number(j["p"], "convexify.p");
  Vec rho = get_vec(j["rho"], "convexify.rho");
  double gamma = get_number(j["gamma"], "convexify.gamma");
  double beta = j.contains("beta") ? get_number(j["beta"], "convexify.beta") : 0.0;
  if (j.contains("beta_naive"))
    *beta_naive = get_number(j["beta_naive"], "convexify.beta_naive");
  try {
    ConvexifySpec spec = ConvexifySpec::make(p, std::move(rho), gamma, beta);
    if (!j.contains("beta")) spec.beta = 0.99 * spec.beta_star();
    return spec;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunParams parse_run(const json& j) {
  reject_unknown(j, "run",
                 {"seed", "n_samples", "deltas", "eps", "candidates", "grid",
                  "tolerance", "z1", "z2", "scale", "scenario"});
  RunParams r;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("run.seed", "must be a non-negative integer");
    r.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("n_samples")) r.n_samples = get_size(j["n_samples"], "run.n_samples");
  if (j.contains("deltas")) r.deltas = get_vec(j["deltas"], "run.deltas");
  if (j.contains("eps")) r.eps = get_vec(j["eps"], "run.eps");
  if (j.contains("candidates")) r.candidates = get_size(j["candidates"], "run.candidates");
  if (j.contains("grid")) r.grid = get_size(j["grid"], "run.grid");
  if (j.contains("tolerance")) r.tolerance = get_number(j["tolerance"], "run.tolerance");
  if (j.contains("z1")) r.z1 = get_vec(j["z1"], "run.z1");
  if (j.contains("z2")) r.z2 = get_vec(j["z2"], "run.z2");
  if (j.contains("scale")) r.scale = get_number(j["scale"], "run.scale");
  if (j.contains("scenario")) {
    if (!j["scenario"].is_string()) fail("run.scenario", "must be a string");
    r.scenario = j["scenario"].get<std::string>();
  }
  return r;
}

ExperimentConfig parse_root(const json& j) {
  if (!j.is_object()) throw ConfigError("config root: must be a JSON object");
  reject_unknown(j, "", {"prior", "forward", "convexify", "run", "verify", "output"});
  ExperimentConfig cfg;
  if (j.contains("prior")) cfg.prior = parse_prior(j["prior"]);
  if (j.contains("forward")) cfg.forward = parse_forward(j["forward"]);
  if (j.contains("convexify"))
    cfg.convexify = parse_convexify(j["convexify"], &cfg.figure_beta_naive);
  if (j.contains("run")) cfg.run = parse_run(j["run"]);
  if (j.contains("verify")) {
    reject_unknown(j["verify"], "verify", {"which"});
    if (!j["verify"].contains("which")) fail("verify.which", "required");
    if (!j["verify"]["which"].is_string()) fail("verify.which", "must be a string");
    cfg.verify_which = j["verify"]["which"].get<std::string>();
    static const std::set<std::string> kinds{"om-limit", "bounds",   "convexity",
                                            "anderson", "vanishing", "shell"};
    if (!kinds.count(cfg.verify_which))
      fail("verify.which",
           "must be one of om-limit, bounds, convexity, anderson, vanishing, shell");
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], "output", {"directory"});
    if (j["output"].contains("directory")) {
      if (!j["output"]["directory"].is_string())
        fail("output.directory", "must be a string");
      cfg.output.directory = j["output"]["directory"].get<std::string>();
    }
  }
  if (cfg.run.deltas.empty()) {
    for (int m = 1; m <= 8; ++m) cfg.run.deltas.push_back(std::ldexp(1.0, -m));
  }
  if (cfg.run.eps.empty()) cfg.run.eps = cfg.run.deltas;
  if (cfg.run.eps.size() != cfg.run.deltas.size())
    fail("run.eps", "length must match run.deltas");
  return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: not valid JSON");
  return parse_root(j);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

Potential ExperimentConfig::make_potential() const {
  if (!prior) throw ConfigError("prior: required");
  if (!forward || forward->kind == "zero") return Potential::zero(prior->dim());
  if (static_cast<std::size_t>(forward->matrix.cols()) != prior->dim())
    throw ConfigError("forward.matrix: column count must equal prior dimension");
  return Potential::gaussian_misfit(ForwardModel::make_linear(forward->matrix),
                                    forward->data, forward->noise_prec_sqrt);
}

}  // namespace maplab
