#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ppt/deriv_solver.hpp"
#include "ppt/errors.hpp"

using namespace ppt;
using testing::kPi;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Match in pi/T units modulo the global detuning sign (and order of the free detunings).
bool matches(const deriv::DerivSolution& s, double rabi, std::vector<double> free, double tol) {
  if (std::abs(s.rabi / kPi - rabi) > tol) return false;
  std::vector<double> got;
  for (double d : s.detunings) got.push_back(d / kPi);
  for (int sign : {1, -1}) {
    std::vector<double> a = got, b = free;
    for (double& x : a) x *= sign;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    bool ok = true;
    for (std::size_t k = 0; k < a.size(); ++k) ok = ok && std::abs(a[k] - b[k]) <= tol;
    if (ok) return true;
  }
  return false;
}

// Least-squares slope of log|1 - P| against log eps on a log-spaced grid in [1e-3, 1e-1].
// Points at the double-precision floor carry no information and are skipped.
double flatness_slope(const PulseTrain& t) {
  std::vector<double> x, y;
  for (int k = 0; k <= 40; ++k) {
    const double eps = std::pow(10.0, -3.0 + 2.0 * k / 40.0);
    const Propagator u = train_propagator(t, {eps, 0.0});
    const double dev = std::norm(u.a);
    if (dev < 1e-14) continue;
    x.push_back(std::log(eps));
    y.push_back(std::log(dev));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("residuals of caption parameters are small") {
  const std::vector<double> d{0.72 * kPi};
  const auto r = deriv::build_residuals(0.6397 * kPi, d, {1.0, 1, 1e-10});
  REQUIRE(r.size() == 2);
  MESSAGE("X3 caption residuals " << r[0] << " " << r[1]);
  CHECK(max_abs(r) <= 5e-2);
}

TEST_CASE("exact pi pulse has zero residual") {
  const auto r = deriv::build_residuals(kPi, {}, {1.0, 0, 1e-10});
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0]) <= 1e-15);
}

TEST_CASE("residual zero is never positive for target 1") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2.0 * kPi, 2.0 * kPi);
  for (int k = 0; k < 500; ++k) {
    const std::vector<double> d{u(rng), u(rng)};
    const auto r = deriv::build_residuals(std::abs(u(rng)), d, {1.0, 2, 1e-10});
    CHECK(r[0] <= 0.0);
    const double p = transition_probability(deriv::make_train(std::abs(u(rng)), d));
    CHECK(p <= 1.0);
  }
}

TEST_CASE("residuals match finite-difference derivatives") {
  const std::vector<double> d{0.8 * kPi, 0.2 * kPi};
  const deriv::DerivProblem prob{0.5, 2, 1e-10};
  const auto r = deriv::build_residuals(0.5 * kPi, d, prob);
  const PulseTrain t = deriv::make_train(0.5 * kPi, d);
  CHECK(r[0] == doctest::Approx(transition_probability(t) - 0.5).epsilon(1e-12));
  CHECK(std::abs(r[1] - probability_derivative(t, 1)) <= 1e-7);
  CHECK(std::abs(r[2] - probability_derivative(t, 2)) <= 1e-6);
}

TEST_CASE("invalid problems are rejected") {
  CHECK_THROWS_AS(deriv::check_problem({0.0, 1, 1e-10}), InvalidInput);
  CHECK_THROWS_AS(deriv::check_problem({1.5, 1, 1e-10}), InvalidInput);
  CHECK_THROWS_AS(deriv::check_problem({1.0, -1, 1e-10}), InvalidInput);
  CHECK_THROWS_AS(deriv::solve({1.0, 1, 1e-10}, 0, 1), InvalidInput);
}

TEST_CASE("solver recovers the N=3 full-transfer solution") {
  const auto rep = deriv::solve({1.0, 1, 1e-10}, 200, 7);
  REQUIRE_FALSE(rep.solutions.empty());
  bool found = false;
  for (const auto& s : rep.solutions) {
    found = found || matches(s, 0.6397, {0.72}, 2e-3);
    CHECK(max_abs(s.residuals) <= 1e-10);
    CHECK(s.detunings[0] >= 0.0);
  }
  CHECK(found);
}

TEST_CASE("solver recovers the N=3 half-transfer solution") {
  const auto rep = deriv::solve({0.5, 1, 1e-10}, 200, 7);
  bool found = false;
  for (const auto& s : rep.solutions) {
    found = found || matches(s, 0.7014, {1.1789}, 2e-3);
    CHECK(max_abs(s.residuals) <= 1e-10);
  }
  CHECK(found);
  // Ranked by total area.
  for (std::size_t k = 1; k < rep.solutions.size(); ++k)
    CHECK(rep.solutions[k - 1].total_area <= rep.solutions[k].total_area);
}

TEST_CASE("solver recovers the N=5 full-transfer solution") {
  const auto rep = deriv::solve({1.0, 2, 1e-10}, 200, 7);
  bool found = false;
  for (const auto& s : rep.solutions) found = found || matches(s, 0.5583, {0.8980, 0.1412}, 5e-3);
  CHECK(found);
}

TEST_CASE("returned solutions reproduce their residuals through su2") {
  for (double p : {1.0, 0.5}) {
    const deriv::DerivProblem prob{p, 2, 1e-10};
    const auto rep = deriv::solve(prob, 100, 3);
    for (const auto& s : rep.solutions) {
      const PulseTrain t = s.train();
      CHECK(t.size() == 5);
      CHECK(std::abs(transition_probability(t) - p) <= 1e-10);
      CHECK(std::abs(probability_derivative(t, 1)) <= 1e-6);
    }
  }
}

TEST_CASE("solve is deterministic") {
  const auto a = deriv::solve({0.5, 2, 1e-10}, 60, 11);
  const auto b = deriv::solve({0.5, 2, 1e-10}, 60, 11, {2.0 * kPi, 2.0 * kPi, 1e-6, 1});
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t k = 0; k < a.solutions.size(); ++k) {
    CHECK(a.solutions[k].rabi == b.solutions[k].rabi);
    CHECK(a.solutions[k].detunings == b.solutions[k].detunings);
  }
}

TEST_CASE("flatness order of derived full-transfer solutions") {
  for (int n : {1, 2}) {
    const auto rep = deriv::solve({1.0, n, 1e-10}, 200, 7);
    REQUIRE_FALSE(rep.solutions.empty());
    const double slope = flatness_slope(rep.solutions.front().train());
    MESSAGE("n=" << n << " slope=" << slope);
    CHECK(slope >= 2.0 * n - 0.2);
  }
}

TEST_CASE("global detuning sign flip leaves the profile unchanged") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0 * kPi, 2.0 * kPi), e(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> d{u(rng), u(rng), u(rng)};
    const std::vector<double> m{-d[0], -d[1], -d[2]};
    const double rabi = std::abs(u(rng));
    const double eps = e(rng);
    CHECK(std::abs(transition_probability(deriv::make_train(rabi, d), {eps, 0.0}) -
                   transition_probability(deriv::make_train(rabi, m), {eps, 0.0})) <= 1e-12);
  }
}
