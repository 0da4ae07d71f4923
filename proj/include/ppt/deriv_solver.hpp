#pragma once

// Derivative-based broadband synthesis for antisymmetric trains
// {d1..dn, 0, -dn..-d1} of length N = 2n + 1.
//
// For a target probability p < 1 the conditions are
//   P(0) = p,  d^k P / d eps^k (0) = 0,  k = 1..n.
// For p = 1 those conditions are degenerate (P <= 1 makes every odd
// derivative vanish together with 1 - P(0)), so the root finder instead
// zeroes the Taylor coefficients of the real amplitude a(eps) = U11 up to
// order n, which makes 1 - P = a^2 vanish to order eps^(2n+2).

#include <cstdint>
#include <span>
#include <vector>

#include "ppt/su2.hpp"

namespace ppt::deriv {

struct DerivProblem {
  double target_p = 1.0;
  int n_free = 1;
  double tolerance = 1e-10;
};

// Throws InvalidInput unless target_p in (0,1] and n_free >= 0.
void check_problem(const DerivProblem& prob);

struct DerivSolution {
  double rabi = 0.0;                // rad per unit duration
  std::vector<double> detunings;    // free detunings d1..dn, rad per unit duration
  std::vector<double> residuals;    // [P(0)-p, P'(0), ..., P^(n)(0)]
  std::vector<double> conditions;   // residuals of the system actually solved
  double total_area = 0.0;          // N * rabi

  PulseTrain train() const;
};

PulseTrain make_train(double rabi, std::span<const double> free_detunings);

// [P(0) - p, dP/deps, ..., d^n P/deps^n] at eps = 0, length n_free + 1.
// Derivatives come from Taylor-mode propagation; for p = 1 the first entry is
// evaluated as -|a(0)|^2, which equals P(0) - 1 without cancellation.
std::vector<double> build_residuals(double rabi, std::span<const double> free_detunings, const DerivProblem& prob);

// The well-conditioned system used by the root finder (see file comment).
std::vector<double> solver_conditions(double rabi, std::span<const double> free_detunings,
                                      const DerivProblem& prob);

struct SolveOptions {
  double rabi_max = 2.0 * 3.14159265358979323846;
  double detuning_max = 2.0 * 3.14159265358979323846;
  double dedup_distance = 1e-6;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SolveReport {
  std::vector<DerivSolution> solutions;
  int seeds = 0;
  int converged = 0;
};

// Multistart Levenberg-Marquardt from uniformly sampled starts in the search
// box. Returns deduplicated solutions canonicalised to d1 >= 0 and sorted by
// total area. Deterministic for a fixed rng_seed regardless of threading.
SolveReport solve(const DerivProblem& prob, int seeds, std::uint64_t rng_seed, const SolveOptions& opt = {});

}  // namespace ppt::deriv
