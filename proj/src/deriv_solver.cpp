#include "ppt/deriv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "ppt/errors.hpp"
#include "ppt/optimize.hpp"
#include "ppt/parallel.hpp"
#include "ppt/random.hpp"

namespace ppt::deriv {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool is_full_transfer(const DerivProblem& prob) { return prob.target_p == 1.0; }

// d1 >= 0 (first non-zero detuning non-negative); the profile is invariant under a global sign flip.
void canonicalise(DerivSolution& s) {
  s.rabi = std::abs(s.rabi);
  for (double d : s.detunings) {
    if (d == 0.0) continue;
    if (d < 0.0) {
      for (double& v : s.detunings) v = -v;
    }
    break;
  }
}

double parameter_distance(const DerivSolution& x, const DerivSolution& y) {
  double d = std::abs(x.rabi - y.rabi);
  for (std::size_t k = 0; k < x.detunings.size(); ++k) d = std::max(d, std::abs(x.detunings[k] - y.detunings[k]));
  return d;
}

}  // namespace

void check_problem(const DerivProblem& prob) {
  if (!(prob.target_p > 0.0 && prob.target_p <= 1.0)) throw InvalidInput("target probability must be in (0, 1]");
  if (prob.n_free < 0) throw InvalidInput("number of free detunings must be >= 0");
  if (!(prob.tolerance > 0.0)) throw InvalidInput("tolerance must be > 0");
}

PulseTrain make_train(double rabi, std::span<const double> free_detunings) {
  return PulseTrain::antisymmetric(rabi, free_detunings, 2 * free_detunings.size() + 1);
}

PulseTrain DerivSolution::train() const { return make_train(rabi, detunings); }

std::vector<double> build_residuals(double rabi, std::span<const double> free_detunings, const DerivProblem& prob) {
  check_problem(prob);
  if (static_cast<int>(free_detunings.size()) != prob.n_free) throw InvalidInput("wrong number of detunings");
  const PulseTrain train = make_train(std::abs(rabi), free_detunings);
  const auto order = static_cast<std::size_t>(prob.n_free);
  const PropagatorJet u = train_propagator_jet(train, order);
  const Jet<cplx> p = u.b * conj(u.b);
  std::vector<double> r(order + 1);
  r[0] = is_full_transfer(prob) ? -std::norm(u.a[0]) : std::norm(u.b[0]) - prob.target_p;
  for (std::size_t k = 1; k <= order; ++k) r[k] = factorial(static_cast<int>(k)) * p[k].real();
  return r;
}

std::vector<double> solver_conditions(double rabi, std::span<const double> free_detunings,
                                      const DerivProblem& prob) {
  const auto order = static_cast<std::size_t>(prob.n_free);
  const PulseTrain train = make_train(std::abs(rabi), free_detunings);
  std::vector<double> r(order + 1);
  if (is_full_transfer(prob)) {
    // a(eps) is real for antisymmetric trains.
    const PropagatorJet u = train_propagator_jet(train, order);
    for (std::size_t k = 0; k <= order; ++k) r[k] = u.a[k].real();
  } else {
    const std::vector<double> p = probability_taylor(train, order);
    r[0] = p[0] - prob.target_p;
    for (std::size_t k = 1; k <= order; ++k) r[k] = p[k];
  }
  return r;
}

SolveReport solve(const DerivProblem& prob, int seeds, std::uint64_t rng_seed, const SolveOptions& opt) {
  check_problem(prob);
  if (seeds < 1) throw InvalidInput("seeds must be >= 1");
  const int n = prob.n_free;

  std::vector<std::optional<DerivSolution>> slots(static_cast<std::size_t>(seeds));
  parallel_for(slots.size(), opt.threads, [&](std::size_t i) {
    auto rng = task_engine(rng_seed, i);
    opt::Vector x0(n + 1);
    // Omega in (0, rabi_max]
    x0[0] = opt.rabi_max - uniform(rng, 0.0, opt.rabi_max);
    for (int k = 0; k < n; ++k) x0[k + 1] = uniform(rng, -opt.detuning_max, opt.detuning_max);

    auto residual_fn = [&](const opt::Vector& x) {
      const std::vector<double> c = solver_conditions(x[0], std::span(x.data() + 1, n), prob);
      return opt::Vector(Eigen::Map<const opt::Vector>(c.data(), static_cast<Eigen::Index>(c.size())));
    };
    opt::LmOptions lm;
    lm.tolerance = 1e-15;
    opt::LmResult fit;
    try {
      fit = opt::levenberg_marquardt(residual_fn, x0, lm);
    } catch (const std::exception&) {
      return;
    }
    if (!fit.x.allFinite()) return;

    DerivSolution s;
    s.rabi = fit.x[0];
    s.detunings.assign(fit.x.data() + 1, fit.x.data() + 1 + n);
    canonicalise(s);
    if (s.rabi <= 0.0 || s.rabi > opt.rabi_max) return;
    for (double d : s.detunings) {
      if (std::abs(d) > opt.detuning_max) return;
    }
    s.conditions = solver_conditions(s.rabi, s.detunings, prob);
    s.residuals = build_residuals(s.rabi, s.detunings, prob);
    const auto worst = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double e : v) m = std::max(m, std::abs(e));
      return m;
    };
    if (!(worst(s.conditions) <= prob.tolerance) || !(worst(s.residuals) <= prob.tolerance)) return;
    s.total_area = static_cast<double>(2 * n + 1) * s.rabi;
    slots[i] = std::move(s);
  });

  SolveReport report;
  report.seeds = seeds;
  for (auto& slot : slots) {
    if (!slot) continue;
    ++report.converged;
    const bool duplicate = std::any_of(report.solutions.begin(), report.solutions.end(), [&](const DerivSolution& e) {
      return parameter_distance(e, *slot) <= opt.dedup_distance;
    });
    if (!duplicate) report.solutions.push_back(std::move(*slot));
  }
  std::stable_sort(report.solutions.begin(), report.solutions.end(),
                   [](const DerivSolution& x, const DerivSolution& y) { return x.total_area < y.total_area; });
  return report;
}

}  // namespace ppt::deriv
