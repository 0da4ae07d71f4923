#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "ppt/errors.hpp"
#include "ppt/profile.hpp"

using namespace ppt;
using testing::kPi;

namespace {

GridSpec fig_grid_2d() { return GridSpec::eps_delta(-1.0, 1.0, 0.01, -2.0 * kPi, 2.0 * kPi, 0.02 * kPi); }

}  // namespace

TEST_CASE("grid construction") {
  const GridSpec g = GridSpec::eps_only(-1.0, 1.0, 2e-3);
  CHECK(g.eps_count() == 1001);
  CHECK(g.delta_count() == 1);
  CHECK(g.eps_at(500) == 0.0);
  CHECK(g.eps_at(1000) == 1.0);
  const GridSpec g2 = fig_grid_2d();
  CHECK(g2.eps_count() == 201);
  CHECK(g2.delta_count() == 201);
  CHECK(g2.delta_at(100) == 0.0);
  CHECK_THROWS_AS(GridSpec::eps_only(-1.0, 1.0, 0.3), InvalidInput);
  CHECK_THROWS_AS(GridSpec::eps_only(1.0, -1.0, 0.1), InvalidInput);
}

TEST_CASE("pi pulse sweep is cos^2") {
  const Profile p = sweep_1d(testing::pi_pulse(), GridSpec::eps_only(-1.0, 1.0, 2e-3));
  double worst = 0.0;
  for (std::size_t i = 0; i < p.grid.eps_count(); ++i) {
    worst = std::max(worst, std::abs(p.at(i) - std::pow(std::cos(kPi * p.grid.eps_at(i) / 2.0), 2)));
  }
  CHECK(worst <= 1e-12);
  CHECK(p.at(0) == 0.0);
}

TEST_CASE("zero drive edge of any sweep") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 10; ++k) CHECK(sweep_1d(testing::random_train(rng, 4), GridSpec::eps_only(-1.0, 1.0, 0.1)).at(0) == 0.0);
}

TEST_CASE("band measurement") {
  const Profile p = sweep_1d(testing::pi_pulse(), GridSpec::eps_only(-1.0, 1.0, 2e-3));
  const BandResult half = band_at_level(p, 1.0, 0.5, BandMode::Inner);
  CHECK(half.attained);
  CHECK(half.value == doctest::Approx(0.5).epsilon(1e-5));

  const Profile x7 = sweep_1d(testing::x7(), GridSpec::eps_only(-1.0, 1.0, 2e-3));
  const BandResult outer = band_at_level(x7, 1.0, 1e-3, BandMode::Outer);
  CHECK(outer.attained);
  CHECK(outer.value > 0.0);
  CHECK(outer.value < 1.0);

  Profile flat{GridSpec::eps_only(-0.5, 0.5, 0.1), std::vector<double>(11, 0.5), "flat"};
  const BandResult edge = band_at_level(flat, 0.5, 1e-6, BandMode::Inner);
  CHECK(edge.value == doctest::Approx(0.5));

  // Pi pulse as narrowband: p(+-1) = 0, so the outer band exists.
  const BandResult pi_outer = band_at_level(p, 1.0, 0.5, BandMode::Outer);
  CHECK(pi_outer.value == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("halving the step moves bands by less than the step") {
  for (const PulseTrain& t : {testing::x3(), testing::x5(), testing::x4(), testing::x7()}) {
    for (double step : {4e-3, 2e-3}) {
      const Profile a = sweep_1d(t, GridSpec::eps_only(-1.0, 1.0, step));
      const Profile b = sweep_1d(t, GridSpec::eps_only(-1.0, 1.0, step / 2.0));
      for (BandMode m : {BandMode::Inner, BandMode::Outer}) {
        const double level = m == BandMode::Inner ? 1e-2 : 1e-3;
        CHECK(std::abs(band_at_level(a, 1.0, level, m).value - band_at_level(b, 1.0, level, m).value) < step);
      }
    }
  }
}

TEST_CASE("1D sweep equals the zero-shift row of the 2D sweep") {
  const GridSpec g2 = fig_grid_2d();
  for (const PulseTrain& t : {testing::fig4_n2(), testing::x5()}) {
    const Profile p2 = sweep_2d(t, g2);
    const Profile p1 = sweep_1d(t, GridSpec::eps_only(-1.0, 1.0, 0.01));
    for (std::size_t i = 0; i < p1.grid.eps_count(); ++i) CHECK(p1.at(i) == p2.at(i, 100));
  }
}

TEST_CASE("2D maps of the double-compensation fixtures") {
  const GridSpec g2 = fig_grid_2d();
  const Profile n2 = sweep_2d(testing::fig4_n2(), g2);
  const Profile n4 = sweep_2d(testing::fig4_n4(), g2);
  CHECK(n2.at(100, 100) == doctest::Approx(0.983).epsilon(1e-3));
  double asym = 0.0;
  for (std::size_t j = 0; j < g2.delta_count(); ++j) {
    for (std::size_t i = 0; i < g2.eps_count(); ++i) asym = std::max(asym, std::abs(n4.at(i, j) - n4.at(i, 200 - j)));
  }
  CHECK(asym <= 1e-12);
  const std::size_t c2 = count_at_least(n2, 0.9), c4 = count_at_least(n4, 0.9);
  MESSAGE("cells p>=0.9: N=2 " << c2 << ", N=4 " << c4);
  CHECK(c4 > c2);
}

TEST_CASE("broadband family widens with length") {
  const GridSpec g = GridSpec::eps_only(-1.0, 1.0, 2e-3);
  const double b3 = band_at_level(sweep_1d(testing::x3(), g), 1.0, 1e-2, BandMode::Inner).value;
  const double b5 = band_at_level(sweep_1d(testing::x5(), g), 1.0, 1e-2, BandMode::Inner).value;
  const double b11 = band_at_level(sweep_1d(testing::x11(), g), 1.0, 1e-2, BandMode::Inner).value;
  MESSAGE("bands at 1e-2: " << b3 << " " << b5 << " " << b11);
  CHECK(b3 < b5);
  CHECK(b5 < b11);
}

TEST_CASE("CSV output") {
  const Profile p = sweep_1d(testing::pi_pulse(), GridSpec::eps_only(-1.0, 1.0, 0.5), "pi");
  std::ostringstream os;
  write_csv(os, p);
  CHECK(os.str() ==
        "# train=pi unit=pi/T\n"
        "eps,p\n"
        "-1,0\n"
        "-0.5,0.5\n"
        "0,1\n"
        "0.5,0.5\n"
        "1,1.49975978e-32\n");

  const Profile q = sweep_2d(testing::pi_pulse(), GridSpec::eps_delta(0.0, 1.0, 1.0, -kPi, kPi, kPi), "pi");
  std::ostringstream os2;
  write_csv(os2, q, {{{"shots", "8"}}});
  std::istringstream in(os2.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# train=pi unit=pi/T");
  std::getline(in, line);
  CHECK(line == "# shots=8");
  std::getline(in, line);
  CHECK(line == "# order=delta-major");
  std::getline(in, line);
  CHECK(line == "eps,delta,p");
  std::getline(in, line);
  CHECK(line.rfind("0,-1,", 0) == 0);
}
