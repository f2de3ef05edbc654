#include "maplab/inverse.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "maplab/rng.hpp"

namespace maplab {

namespace {

Eigen::VectorXd to_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) {
  return Vec(v.data(), v.data() + v.size());
}

}  // namespace

ForwardModel ForwardModel::make_linear(Matrix a) {
  ForwardModel m;
  m.linear = true;
  m.matrix = std::move(a);
  m.map = [mat = m.matrix](const Vec& u) {
    if (static_cast<Eigen::Index>(u.size()) != mat.cols())
      throw std::invalid_argument("forward: dimension mismatch");
    return from_eigen(mat * to_eigen(u));
  };
  m.jacobian = [mat = m.matrix](const Vec&) { return mat; };
  return m;
}

ForwardModel ForwardModel::make_user(std::function<Vec(const Vec&)> map,
                                     std::function<Matrix(const Vec&)> jacobian) {
  ForwardModel m;
  m.map = std::move(map);
  m.jacobian = std::move(jacobian);
  return m;
}

Potential Potential::zero(std::size_t dim) {
  Potential p;
  p.zero_ = true;
  p.input_dim_ = dim;
  return p;
}

Potential Potential::gaussian_misfit(ForwardModel forward, Vec data,
                                     Matrix noise_prec_sqrt, std::size_t input_dim) {
  if (noise_prec_sqrt.rows() != noise_prec_sqrt.cols() ||
      noise_prec_sqrt.rows() != static_cast<Eigen::Index>(data.size()))
    throw std::invalid_argument("potential: noise_prec_sqrt must be d x d");
  Potential p;
  p.forward_ = std::move(forward);
  p.data_ = std::move(data);
  p.noise_prec_sqrt_ = std::move(noise_prec_sqrt);
  if (p.forward_.linear)
    p.input_dim_ = static_cast<std::size_t>(p.forward_.matrix.cols());
  else if (input_dim > 0)
    p.input_dim_ = input_dim;
  else
    throw std::invalid_argument("potential: input_dim required for user models");
  p.offset_ = 0.0;
  p.offset_ = p.raw(Vec(p.input_dim_, 0.0));
  return p;
}

double Potential::raw(const Vec& u) const {
  Vec gu = forward_.map(u);
  Eigen::VectorXd r = to_eigen(data_) - to_eigen(gu);
  Eigen::VectorXd w = noise_prec_sqrt_ * r;
  double v = 0.5 * w.squaredNorm();
  if (!std::isfinite(v)) throw std::runtime_error("potential: non-finite forward output");
  return v;
}

double Potential::operator()(const Vec& u) const {
  if (zero_) return 0.0;
  return raw(u) - offset_;
}

Vec Potential::gradient(const Vec& u) const {
  if (zero_) return Vec(u.size(), 0.0);
  if (forward_.jacobian) {
    Matrix jac = forward_.jacobian(u);
    Eigen::VectorXd r = to_eigen(forward_.map(u)) - to_eigen(data_);
    Matrix w = noise_prec_sqrt_.transpose() * noise_prec_sqrt_;
    return from_eigen(jac.transpose() * (w * r));
  }
  // central differences, step scaled by the sup norm
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  double h = 1e-6 * (1.0 + umax);
  Vec g(u.size());
  Vec up = u;
  for (std::size_t j = 0; j < u.size(); ++j) {
    double orig = up[j];
    up[j] = orig + h;
    double fp = (*this)(up);
    up[j] = orig - h;
    double fm = (*this)(up);
    up[j] = orig;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double lipschitz_estimate(const Potential& pot, double r, double p,
                          std::size_t trials, std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("lipschitz_estimate: r must be positive");
  if (pot.is_zero()) return 0.0;
  std::size_t dim = pot.input_dim();
  double best = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Vec u1(dim), u2(dim);
    StreamRng rng(seed, t, 0);
    // uniform in the cube, rejected into the l^p r-ball by rescaling
    for (std::size_t j = 0; j < dim; ++j) u1[j] = rng.uniform(-1.0, 1.0);
    for (std::size_t j = 0; j < dim; ++j) u2[j] = rng.uniform(-1.0, 1.0);
    double n1 = lp_norm(u1, p), n2 = lp_norm(u2, p);
    if (n1 > 0.0) u1 = scale(u1, r * std::pow(rng.uniform(), 1.0 / dim) / n1);
    if (n2 > 0.0) u2 = scale(u2, r * std::pow(rng.uniform(), 1.0 / dim) / n2);
    double dist = lp_norm(sub(u1, u2), p);
    if (dist < 1e-12) continue;
    best = std::max(best, std::abs(pot(u1) - pot(u2)) / dist);
  }
  return best;
}

double om_value(const Potential& pot, const PriorSpec& prior, const Vec& u) {
  return pot(u) + 0.5 * cm_norm_sq(u, prior);
}

OmResult minimize_om(const Potential& pot, const PriorSpec& prior, const Vec& x0,
                     double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_om: tol must be positive");
  const std::size_t dim = x0.size();
  const std::size_t memory = 10;

  auto objective = [&](const Eigen::VectorXd& x) {
    return om_value(pot, prior, from_eigen(x));
  };
  auto gradient = [&](const Eigen::VectorXd& x) {
    Vec u = from_eigen(x);
    Vec gp = pot.gradient(u);
    Eigen::VectorXd g = to_eigen(gp);
    for (std::size_t j = 0; j < dim; ++j)
      g[static_cast<Eigen::Index>(j)] += u[j] / (prior.sigmas[j] * prior.sigmas[j]);
    return g;
  };

  Eigen::VectorXd x = to_eigen(x0);
  double f = objective(x);
  Eigen::VectorXd g = gradient(x);
  if (!std::isfinite(f)) throw std::runtime_error("minimize_om: non-finite objective at x0");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  OmResult out;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    if (g.norm() <= tol) break;

    // two-loop L-BFGS direction
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd d = -q;
    if (d.dot(g) >= 0.0) d = -g;  // fall back to steepest descent

    // backtracking with Armijo sufficient decrease
    double step = 1.0;
    double slope = g.dot(d);
    double f_new = f;
    Eigen::VectorXd x_new = x;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = objective(x_new);
      // epsilon slack: near the minimum the true decrease drops below the
      // rounding granularity of f and strict Armijo would stall
      if (std::isfinite(f_new) &&
          f_new <= f + 1e-4 * step * slope + 1e-15 * (1.0 + std::abs(f))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::VectorXd g_new = gradient(x_new);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > 1e-14) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    f = f_new;
    g = g_new;
  }

  out.minimizer = from_eigen(x);
  out.value = f;
  out.iterations = iter;
  out.grad_norm = g.norm();
  out.converged = out.grad_norm <= tol;
  return out;
}

}  // namespace maplab
