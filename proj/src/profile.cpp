#include "ppt/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "ppt/errors.hpp"
#include "ppt/parallel.hpp"

namespace ppt {

namespace {

std::size_t lattice_count(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

void check_axis(double lo, double hi, double step, const char* name) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw InvalidInput(std::string(name) + " axis is not finite");
  }
  if (!(lo < hi)) throw InvalidInput(std::string(name) + " axis needs lo < hi");
  if (!(step > 0.0)) throw InvalidInput(std::string(name) + " axis needs step > 0");
  const double cells = (hi - lo) / step;
  if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
    throw InvalidInput(std::string(name) + " step does not divide the range");
  }
}

// Interpolated position where the segment (x0, g0) -> (x1, g1) crosses zero;
// g is "excess over level" (> 0 violates).
double crossing(double x0, double g0, double x1, double g1) {
  if (g1 == g0) return 0.5 * (x0 + x1);
  return x0 + (x1 - x0) * (-g0) / (g1 - g0);
}

}  // namespace

GridSpec GridSpec::eps_only(double lo, double hi, double step) {
  GridSpec g;
  g.eps_lo = lo;
  g.eps_hi = hi;
  g.eps_step = step;
  g.check();
  return g;
}

GridSpec GridSpec::eps_delta(double lo, double hi, double step, double dlo, double dhi, double dstep) {
  GridSpec g = eps_only(lo, hi, step);
  g.delta_lo = dlo;
  g.delta_hi = dhi;
  g.delta_step = dstep;
  g.check();
  return g;
}

void GridSpec::check() const {
  check_axis(eps_lo, eps_hi, eps_step, "eps");
  if (delta_step || delta_lo || delta_hi) {
    if (!(delta_step && delta_lo && delta_hi)) throw InvalidInput("incomplete delta axis");
    check_axis(*delta_lo, *delta_hi, *delta_step, "delta");
  }
}

std::size_t GridSpec::eps_count() const { return lattice_count(eps_lo, eps_hi, eps_step); }

std::size_t GridSpec::delta_count() const {
  return is_2d() ? lattice_count(*delta_lo, *delta_hi, *delta_step) : 1;
}

double GridSpec::eps_at(std::size_t i) const {
  if (i + 1 == eps_count()) return eps_hi;
  const double v = eps_lo + static_cast<double>(i) * eps_step;
  return std::abs(v) < 1e-9 * eps_step ? 0.0 : v;
}

double GridSpec::delta_at(std::size_t j) const {
  if (!is_2d()) return 0.0;
  if (j + 1 == delta_count()) return *delta_hi;
  const double v = *delta_lo + static_cast<double>(j) * *delta_step;
  return std::abs(v) < 1e-9 * *delta_step ? 0.0 : v;
}

Profile sweep_1d(const PulseTrain& train, const GridSpec& grid, std::string train_id) {
  grid.check();
  if (grid.is_2d()) throw InvalidInput("sweep_1d needs a 1D grid");
  Profile p{grid, std::vector<double>(grid.eps_count()), std::move(train_id)};
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = transition_probability(train, {grid.eps_at(i), 0.0});
  }
  return p;
}

Profile sweep_2d(const PulseTrain& train, const GridSpec& grid, std::string train_id) {
  grid.check();
  if (!grid.is_2d()) throw InvalidInput("sweep_2d needs a 2D grid");
  const std::size_t ne = grid.eps_count();
  const std::size_t nd = grid.delta_count();
  Profile p{grid, std::vector<double>(ne * nd), std::move(train_id)};
  parallel_for(nd, 0, [&](std::size_t j) {
    const double delta = grid.delta_at(j);
    for (std::size_t i = 0; i < ne; ++i) p.values[j * ne + i] = transition_probability(train, {grid.eps_at(i), delta});
  });
  return p;
}

BandResult band_at_level(const Profile& profile, double target, double level, BandMode mode) {
  const GridSpec& g = profile.grid;
  const std::size_t ne = g.eps_count();
  std::size_t row = 0;
  if (g.is_2d()) {
    bool found = false;
    for (std::size_t j = 0; j < g.delta_count(); ++j) {
      if (std::abs(g.delta_at(j)) < 1e-12) {
        row = j;
        found = true;
        break;
      }
    }
    if (!found) throw InvalidInput("2D profile has no delta = 0 row");
  }
  auto eps = [&](std::size_t i) { return g.eps_at(i); };
  auto val = [&](std::size_t i) { return profile.values[row * ne + i]; };

  if (mode == BandMode::Inner) {
    auto excess = [&](std::size_t i) { return std::abs(val(i) - target) - level; };
    // index of eps closest to 0
    std::size_t c = 0;
    for (std::size_t i = 1; i < ne; ++i) {
      if (std::abs(eps(i)) < std::abs(eps(c))) c = i;
    }
    if (excess(c) > 0.0) return {0.0, false};
    double right = eps(ne - 1);
    for (std::size_t i = c; i + 1 < ne; ++i) {
      if (excess(i + 1) > 0.0) {
        right = crossing(eps(i), excess(i), eps(i + 1), excess(i + 1));
        break;
      }
    }
    double left = eps(0);
    for (std::size_t i = c; i > 0; --i) {
      if (excess(i - 1) > 0.0) {
        left = crossing(eps(i), excess(i), eps(i - 1), excess(i - 1));
        break;
      }
    }
    return {std::max(0.0, std::min(right, -left)), true};
  }

  auto excess = [&](std::size_t i) { return val(i) - level; };
  const double edge = std::max(std::abs(eps(0)), std::abs(eps(ne - 1)));
  if (excess(0) > 0.0 || excess(ne - 1) > 0.0) return {edge, false};
  double band = 0.0;
  // outermost violation on each side, then interpolate towards the edge
  for (std::size_t i = ne - 1; i > 0; --i) {
    if (excess(i - 1) > 0.0) {
      band = std::max(band, std::abs(crossing(eps(i - 1), excess(i - 1), eps(i), excess(i))));
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < ne; ++i) {
    if (excess(i + 1) > 0.0) {
      band = std::max(band, std::abs(crossing(eps(i + 1), excess(i + 1), eps(i), excess(i))));
      break;
    }
  }
  return {band, true};
}

std::size_t count_at_least(const Profile& profile, double level) {
  return static_cast<std::size_t>(
      std::count_if(profile.values.begin(), profile.values.end(), [&](double v) { return v >= level; }));
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& os, const Profile& profile, const CsvHeader& extra) {
  const GridSpec& g = profile.grid;
  os << "# train=" << (profile.train_id.empty() ? "anonymous" : profile.train_id) << " unit=pi/T\n";
  if (!extra.fields.empty()) {
    os << "#";
    for (const auto& [k, v] : extra.fields) os << ' ' << k << '=' << v;
    os << '\n';
  }
  if (g.is_2d()) {
    os << "# order=delta-major\n";
    os << "eps,delta,p\n";
  } else {
    os << "eps,p\n";
  }
  const std::size_t ne = g.eps_count();
  for (std::size_t j = 0; j < g.delta_count(); ++j) {
    for (std::size_t i = 0; i < ne; ++i) {
      os << format_number(g.eps_at(i));
      if (g.is_2d()) os << ',' << format_number(g.delta_at(j) / std::numbers::pi);
      os << ',' << format_number(profile.values[j * ne + i]) << '\n';
    }
  }
}

}  // namespace ppt
