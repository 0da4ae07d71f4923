#include "ppt/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace ppt::opt {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

Vector numeric_gradient(const Objective& f, const Vector& x, double rel_step, int* evaluations) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  if (evaluations) *evaluations += static_cast<int>(2 * x.size());
  return g;
}

BfgsResult bfgs(const Objective& f, Vector x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.value = f(res.x);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  Vector g = numeric_gradient(f, res.x, opt.fd_step, &res.evaluations);

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (!all_finite(g)) break;
    if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    Vector dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // Lost descent: restart from steepest descent.
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }

    double step = 1.0;
    Vector x_new;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + step * dir;
      f_new = f(x_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) break;
      hinv.setIdentity();
      continue;
    }

    const Vector s = x_new - res.x;
    const Vector g_new = numeric_gradient(f, x_new, opt.fd_step, &res.evaluations);
    const Vector y = g_new - g;
    const double improvement = res.value - f_new;
    res.x = x_new;
    res.value = f_new;
    g = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (res.iterations == 0) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Vector hy = hinv * y;
      hinv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
    if (s.lpNorm<Eigen::Infinity>() <= opt.step_tolerance * std::max(1.0, res.x.lpNorm<Eigen::Infinity>()) &&
        improvement <= 1e-16 * std::abs(res.value)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

LmResult levenberg_marquardt(const ResidualFn& rfn, Vector x0, const LmOptions& opt) {
  LmResult res;
  res.x = std::move(x0);
  res.residuals = rfn(res.x);
  if (!all_finite(res.residuals)) return res;
  double cost = res.residuals.squaredNorm();
  double lambda = opt.initial_damping;
  const Eigen::Index n = res.x.size();
  const Eigen::Index m = res.residuals.size();

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (res.residuals.lpNorm<Eigen::Infinity>() <= opt.tolerance) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd jac(m, n);
    Vector xp = res.x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = opt.fd_step * std::max(1.0, std::abs(res.x[i]));
      xp[i] = res.x[i] + h;
      jac.col(i) = (rfn(xp) - res.residuals) / h;
      xp[i] = res.x[i];
    }
    if (!jac.allFinite()) return res;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Vector jtr = jac.transpose() * res.residuals;

    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Vector dx = a.ldlt().solve(-jtr);
      if (!dx.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Vector x_new = res.x + dx;
      const Vector r_new = rfn(x_new);
      const double c_new = r_new.allFinite() ? r_new.squaredNorm() : INFINITY;
      if (c_new < cost) {
        res.x = x_new;
        res.residuals = r_new;
        cost = c_new;
        lambda = std::max(lambda * 0.2, 1e-15);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  if (res.residuals.lpNorm<Eigen::Infinity>() <= opt.tolerance) res.converged = true;
  return res;
}

}  // namespace ppt::opt
