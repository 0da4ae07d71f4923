#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "ppt/errors.hpp"
#include "ppt/su2.hpp"

using namespace ppt;
using testing::kPi;

namespace {

double max_diff(const Propagator& x, const Propagator& y) {
  return std::max(std::abs(x.a - y.a), std::abs(x.b - y.b));
}

}  // namespace

TEST_CASE("pulse propagator closed-form cases") {
  const Propagator pi = pulse_propagator({kPi, 0.0, 1.0});
  CHECK(std::abs(pi.a) < 1e-15);
  CHECK(std::abs(pi.b - cplx(0.0, -1.0)) < 1e-15);

  const double d = 0.7;
  const Propagator phase = pulse_propagator({0.0, d, 1.0});
  CHECK(std::abs(phase.a - std::polar(1.0, d / 2.0)) < 1e-15);
  CHECK(std::abs(phase.b) == 0.0);

  const Propagator id = pulse_propagator({0.0, 0.0, 1.0});
  CHECK(id.a == cplx(1.0, 0.0));
  CHECK(id.b == cplx(0.0, 0.0));
}

TEST_CASE("apply_error definition") {
  const Pulse p{1.0, 0.5, 1.0};
  const Pulse same = apply_error(p, {});
  CHECK(same.rabi == 1.0);
  CHECK(same.detuning == 0.5);
  CHECK(apply_error(p, {0.1, 0.0}).rabi == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(apply_error(p, {0.0, -0.2}).detuning == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(apply_error(p, {-1.5, 0.0}), InvalidInput);
}

TEST_CASE("invalid pulses and trains are rejected") {
  CHECK_THROWS_AS(check_pulse({-1.0, 0.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(check_pulse({1.0, 0.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(check_pulse({1.0, std::nan(""), 1.0}), InvalidInput);
  CHECK_THROWS_AS(PulseTrain({}), InvalidInput);
  CHECK_THROWS_AS(PulseTrain({{1.0, 0.0, 1.0}, {2.0, 0.0, 1.0}}), InvalidInput);
  const std::vector<double> d{0.3, 0.1, 0.3};
  CHECK_THROWS_AS(PulseTrain::from_detunings(1.0, d, Symmetry::Antisymmetric), InvalidInput);
  CHECK_NOTHROW(PulseTrain::from_detunings(1.0, d, Symmetry::Symmetric));
}

TEST_CASE("train constructors place the middle pulse") {
  const std::vector<double> free{0.4, 0.2};
  CHECK(PulseTrain::antisymmetric(1.0, free, 5).detunings() == std::vector<double>{0.4, 0.2, 0.0, -0.2, -0.4});
  CHECK(PulseTrain::antisymmetric(1.0, free, 4).detunings() == std::vector<double>{0.4, 0.2, -0.2, -0.4});
  CHECK(PulseTrain::symmetric(1.0, free, 3).detunings() == std::vector<double>{0.4, 0.2, 0.4});
  CHECK(PulseTrain::symmetric(1.0, free, 4).detunings() == std::vector<double>{0.4, 0.2, 0.2, 0.4});
}

TEST_CASE("closed-form Pauli exponential agrees") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const PulseTrain t = testing::random_train(rng, 5);
    CHECK(std::abs(transition_probability(t, {0.1, -0.3}) - oracle::probability(t, 0.1, -0.3)) <= 1e-12);
  }
}

TEST_CASE("caption trains reach their targets") {
  CHECK(transition_probability(testing::x3()) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(transition_probability(testing::h3()) == doctest::Approx(0.5).epsilon(2e-3));
  // Recorded oracle value: the two-pulse set does not reach 1 at the origin.
  CHECK(transition_probability(testing::fig4_n2()) == doctest::Approx(0.98306431).epsilon(1e-7));
  // 1 - (1 - 2 p1)^2 with p1 the single-pulse probability.
  const double p1 = transition_probability(testing::caption_train(0.937, {0.735}));
  CHECK(transition_probability(testing::fig4_n2()) == doctest::Approx(1.0 - std::pow(1.0 - 2.0 * p1, 2)).epsilon(1e-12));
}

TEST_CASE("single pulse train equals the pulse propagator") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const PulseTrain t = testing::random_train(rng, 1);
    CHECK(max_diff(train_propagator(t), pulse_propagator(t.pulses()[0])) == 0.0);
  }
}

TEST_CASE("single pulse profile is cos^2") {
  CHECK(transition_probability(testing::pi_pulse(), {0.2, 0.0}) ==
        doctest::Approx(std::pow(std::cos(0.1 * kPi), 2)).epsilon(1e-14));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) CHECK(transition_probability(testing::random_train(rng, 5), {-1.0, 0.0}) == 0.0);
}

TEST_CASE("unitarity on random pulses") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rabi(0.0, 20.0), det(-20.0, 20.0), dur(0.01, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) worst = std::max(worst, pulse_propagator({rabi(rng), det(rng), dur(rng)}).unitarity_defect());
  CHECK(worst <= 1e-12);
}

TEST_CASE("composition is associative") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> rabi(0.0, 7.0), det(-7.0, 7.0);
  for (int k = 0; k < 200; ++k) {
    const Propagator u1 = pulse_propagator({rabi(rng), det(rng), 1.0});
    const Propagator u2 = pulse_propagator({rabi(rng), det(rng), 1.0});
    const Propagator u3 = pulse_propagator({rabi(rng), det(rng), 1.0});
    CHECK(max_diff((u3 * u2) * u1, u3 * (u2 * u1)) <= 1e-12);
  }
}

TEST_CASE("propagator matches direct Schroedinger integration") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 7);
  std::uniform_real_distribution<double> eps(-0.5, 0.5), shift(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PulseTrain t = testing::random_train(rng, static_cast<std::size_t>(len(rng)));
    const ErrorPoint e{eps(rng), shift(rng)};
    worst = std::max(worst, oracle::ode_mismatch(t, e));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("antisymmetric profile is even in detuning shift") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> det(-6.0, 6.0), rabi(0.5, 6.0), eps(-0.9, 1.0), shift(-6.0, 6.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> free{det(rng), det(rng), det(rng)};
    const PulseTrain t = PulseTrain::antisymmetric(rabi(rng), free, 6 + (k % 2));
    const double e = eps(rng), d = shift(rng);
    CHECK(std::abs(transition_probability(t, {e, d}) - transition_probability(t, {e, -d})) <= 1e-12);
  }
}

TEST_CASE("zero-area limit is continuous") {
  for (double s : {1e-3, 1e-6, 1e-9, 1e-12, 1e-14, 0.0}) {
    const PulseTrain t({{s, s, 1.0}});
    CHECK(transition_probability(t) <= s * s);
    CHECK(train_propagator(t).unitarity_defect() <= 1e-15);
  }
}

TEST_CASE("probability derivatives of the resonant pi pulse") {
  const PulseTrain t = testing::pi_pulse();
  CHECK(std::abs(probability_derivative(t, 1)) <= 1e-8);
  CHECK(std::abs(probability_derivative(t, 2) + kPi * kPi / 2.0) <= 1e-5);
  CHECK_THROWS_AS(probability_derivative(t, kMaxDerivativeOrder + 1), InvalidInput);
}

TEST_CASE("caption N=5 derivatives are small") {
  const PulseTrain t = testing::x5();
  const double d1 = probability_derivative(t, 1), d2 = probability_derivative(t, 2);
  MESSAGE("X5 caption dP/de=" << d1 << " d2P/de2=" << d2);
  CHECK(std::abs(d1) <= 5e-2);
  CHECK(std::abs(d2) <= 5e-2);
}

// Orders 3 and 4 use a wider step: at h = 1e-3 their stencils are rounding-limited.
TEST_CASE("Taylor jets agree with finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> eps(-0.3, 0.3);
  for (int k = 0; k < 20; ++k) {
    const PulseTrain t = testing::random_train(rng, 1 + k % 6);
    const ErrorPoint at{eps(rng), 0.1};
    const auto c = probability_taylor(t, 4, at);
    double fact = 1.0;
    for (int j = 0; j <= 4; ++j) {
      if (j > 0) fact *= j;
      const double jet = c[static_cast<std::size_t>(j)] * fact;
      if (j == 0) {
        CHECK(jet == doctest::Approx(transition_probability(t, at)).epsilon(1e-12));
      } else {
        DerivativeOptions opt;
        if (j > 2) opt.base_step = 1e-2;
        const double tol = j > 2 ? 1e-4 : 1e-5;
        CHECK(std::abs(jet - probability_derivative(t, j, at, opt)) <= tol * std::max(1.0, std::abs(jet)));
      }
    }
  }
}
