#pragma once

// Small dense unconstrained optimizers used by the synthesis modules.

#include <Eigen/Dense>
#include <functional>

namespace ppt::opt {

using Vector = Eigen::VectorXd;
using Objective = std::function<double(const Vector&)>;
using ResidualFn = std::function<Vector(const Vector&)>;

struct BfgsOptions {
  int max_iterations = 400;
  double gradient_tolerance = 1e-12;
  double step_tolerance = 1e-14;
  double fd_step = 1e-7;  // relative central-difference step for the gradient
};

struct BfgsResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Central-difference gradient.
Vector numeric_gradient(const Objective& f, const Vector& x, double rel_step, int* evaluations = nullptr);

// Quasi-Newton BFGS with inverse-Hessian updates, numerically estimated
// gradients and a backtracking Armijo line search.
BfgsResult bfgs(const Objective& f, Vector x0, const BfgsOptions& opt = {});

struct LmOptions {
  int max_iterations = 200;
  double tolerance = 1e-15;  // on max |residual|
  double fd_step = 1e-7;
  double initial_damping = 1e-3;
};

struct LmResult {
  Vector x;
  Vector residuals;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt on a square or overdetermined residual system with a
// forward-difference Jacobian. Stops when max |r| <= tolerance or progress stalls.
LmResult levenberg_marquardt(const ResidualFn& r, Vector x0, const LmOptions& opt = {});

}  // namespace ppt::opt
