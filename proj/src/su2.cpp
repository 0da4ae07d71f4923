#include "ppt/su2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppt/errors.hpp"

namespace ppt {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Propagator of a pulse with signed amplitude; no precondition checks.
Propagator propagator_unchecked(double rabi, double detuning, double duration) {
  const double lambda = std::hypot(rabi, detuning);
  const double area = lambda * duration;
  if (area < kZeroAreaThreshold) {
    // Lambda -> 0: cos(A/2) -> 1, (Delta/Lambda) sin(A/2) -> Delta T / 2 -> 0.
    return {cplx{std::cos(0.5 * detuning * duration), std::sin(0.5 * detuning * duration)}, cplx{}};
  }
  const double s = std::sin(0.5 * area);
  return {cplx{std::cos(0.5 * area), detuning / lambda * s}, cplx{0.0, -rabi / lambda * s}};
}

Propagator compose_unchecked(const PulseTrain& t, double eps, double shift) {
  Propagator u;
  for (const auto& p : t.pulses()) {
    u = propagator_unchecked(p.rabi * (1.0 + eps), p.detuning + shift, p.duration) * u;
  }
  return u;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Jet<cplx> to_complex(const Jet<double>& r, cplx scale) {
  Jet<cplx> c(r.order());
  for (std::size_t k = 0; k <= r.order(); ++k) c[k] = scale * r[k];
  return c;
}

// Jets of cos(sqrt(x) T/2) and sin(sqrt(x) T/2)/sqrt(x) for x = Lambda^2.
void area_functions(const Jet<double>& x, double duration, Jet<double>& cos_half, Jet<double>& sinc_half) {
  const std::size_t n = x.order();
  const double quarter_t2 = 0.25 * duration * duration;
  if (x[0] * quarter_t2 < 0.25) {
    // Both functions are entire in x; sum their power series in y = x T^2/4.
    const Jet<double> y = x * quarter_t2;
    Jet<double> term(n, 1.0);  // (-y)^m / (2m)!
    Jet<double> term_odd(n, 1.0);  // (-y)^m / (2m+1)!
    cos_half = Jet<double>(n);
    sinc_half = Jet<double>(n);
    for (int m = 0; m < 60; ++m) {
      cos_half += term;
      sinc_half += term_odd;
      const double a = 1.0 / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
      const double b = 1.0 / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
      term = term * y * (-a);
      term_odd = term_odd * y * (-b);
    }
    sinc_half *= 0.5 * duration;
    return;
  }
  const Jet<double> lambda = sqrt(x);
  Jet<double> s, c;
  sincos(lambda * (0.5 * duration), s, c);
  cos_half = c;
  sinc_half = s / lambda;
}

}  // namespace

const char* to_string(Symmetry s) {
  switch (s) {
    case Symmetry::General: return "general";
    case Symmetry::Symmetric: return "symmetric";
    case Symmetry::Antisymmetric: return "antisymmetric";
  }
  return "general";
}

Symmetry symmetry_from_string(const std::string& s) {
  if (s == "general") return Symmetry::General;
  if (s == "symmetric") return Symmetry::Symmetric;
  if (s == "antisymmetric") return Symmetry::Antisymmetric;
  throw InvalidInput("unknown symmetry '" + s + "'");
}

void check_pulse(const Pulse& p) {
  if (!finite(p.rabi) || !finite(p.detuning) || !finite(p.duration)) {
    throw InvalidInput("pulse has non-finite field");
  }
  if (p.rabi < 0.0) throw InvalidInput("pulse rabi frequency must be >= 0");
  if (p.duration <= 0.0) throw InvalidInput("pulse duration must be > 0");
}

PulseTrain::PulseTrain(std::vector<Pulse> pulses, Symmetry symmetry)
    : pulses_(std::move(pulses)), symmetry_(symmetry) {
  if (pulses_.empty()) throw InvalidInput("pulse train is empty");
  for (const auto& p : pulses_) {
    check_pulse(p);
    if (p.rabi != pulses_.front().rabi || p.duration != pulses_.front().duration) {
      throw InvalidInput("pulses in a train must share rabi frequency and duration");
    }
  }
  const std::size_t n = pulses_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = pulses_[n - 1 - k].detuning;
    const double rhs = pulses_[k].detuning;
    const double tol = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (symmetry_ == Symmetry::Antisymmetric && std::abs(lhs + rhs) > tol) {
      throw InvalidInput("detunings violate the antisymmetric condition");
    }
    if (symmetry_ == Symmetry::Symmetric && std::abs(lhs - rhs) > tol) {
      throw InvalidInput("detunings violate the symmetric condition");
    }
  }
}

PulseTrain PulseTrain::from_detunings(double rabi, std::span<const double> detunings, Symmetry symmetry,
                                      double duration) {
  std::vector<Pulse> pulses;
  pulses.reserve(detunings.size());
  for (double d : detunings) pulses.push_back({rabi, d, duration});
  return PulseTrain(std::move(pulses), symmetry);
}

PulseTrain PulseTrain::antisymmetric(double rabi, std::span<const double> free_detunings, std::size_t length,
                                     double duration) {
  if (free_detunings.size() != length / 2) {
    throw InvalidInput("antisymmetric train of length " + std::to_string(length) + " needs " +
                       std::to_string(length / 2) + " free detunings");
  }
  std::vector<double> d(free_detunings.begin(), free_detunings.end());
  if (length % 2 == 1) d.push_back(0.0);
  for (auto it = free_detunings.rbegin(); it != free_detunings.rend(); ++it) d.push_back(-*it);
  return from_detunings(rabi, d, Symmetry::Antisymmetric, duration);
}

PulseTrain PulseTrain::symmetric(double rabi, std::span<const double> free_detunings, std::size_t length,
                                 double duration) {
  if (free_detunings.size() != (length + 1) / 2) {
    throw InvalidInput("symmetric train of length " + std::to_string(length) + " needs " +
                       std::to_string((length + 1) / 2) + " free detunings");
  }
  std::vector<double> d(free_detunings.begin(), free_detunings.end());
  const std::size_t mirrored = length / 2;
  for (std::size_t k = mirrored; k-- > 0;) d.push_back(free_detunings[k]);
  return from_detunings(rabi, d, Symmetry::Symmetric, duration);
}

std::vector<double> PulseTrain::detunings() const {
  std::vector<double> d;
  d.reserve(pulses_.size());
  for (const auto& p : pulses_) d.push_back(p.detuning);
  return d;
}

double PulseTrain::total_area() const { return static_cast<double>(size()) * rabi() * duration(); }

Propagator pulse_propagator(const Pulse& p) {
  check_pulse(p);
  return propagator_unchecked(p.rabi, p.detuning, p.duration);
}

Pulse apply_error(const Pulse& p, const ErrorPoint& e) {
  if (!finite(e.eps) || !finite(e.detuning_shift)) throw InvalidInput("error point is not finite");
  if (e.eps <= -1.0) throw InvalidInput("relative Rabi error must be > -1");
  return {p.rabi * (1.0 + e.eps), p.detuning + e.detuning_shift, p.duration};
}

Propagator train_propagator(const PulseTrain& t, const ErrorPoint& e) {
  if (!finite(e.eps) || !finite(e.detuning_shift)) throw InvalidInput("error point is not finite");
  if (e.eps < -1.0) throw InvalidInput("relative Rabi error must be >= -1");
  // eps = -1 (zero drive) is the limit of apply_error and is allowed here.
  return compose_unchecked(t, e.eps, e.detuning_shift);
}

double transition_probability(const PulseTrain& t, const ErrorPoint& e) {
  return std::clamp(train_propagator(t, e).transition_probability(), 0.0, 1.0);
}

Propagator compose(double rabi, std::span<const double> detunings, double duration, const ErrorPoint& e) {
  Propagator u;
  const double r = rabi * (1.0 + e.eps);
  for (double d : detunings) u = propagator_unchecked(r, d + e.detuning_shift, duration) * u;
  return u;
}

double probability_derivative(const PulseTrain& t, int order, const ErrorPoint& at, const DerivativeOptions& opt) {
  if (order < 1 || order > kMaxDerivativeOrder) {
    throw InvalidInput("derivative order must be in [1, " + std::to_string(kMaxDerivativeOrder) + "]");
  }
  if (!(opt.base_step > 0.0) || opt.richardson_levels < 1) throw InvalidInput("bad derivative options");
  if (!finite(at.eps) || !finite(at.detuning_shift)) throw InvalidInput("error point is not finite");

  const Propagator centre = compose_unchecked(t, at.eps, at.detuning_shift);
  const bool use_infidelity = std::norm(centre.a) < std::norm(centre.b);
  auto f = [&](double eps) {
    const Propagator u = compose_unchecked(t, eps, at.detuning_shift);
    return use_infidelity ? -std::norm(u.a) : std::norm(u.b);
  };

  auto central = [&](double h) {
    double s = 0.0;
    for (int j = 0; j <= order; ++j) {
      const double offset = (0.5 * order - j) * h;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s += sign * binomial(order, j) * f(at.eps + offset);
    }
    return s / std::pow(h, order);
  };

  // Error expansion of the central stencil is even in h.
  const int levels = opt.richardson_levels;
  std::vector<std::vector<double>> table(levels);
  double h = opt.base_step;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    table[i].resize(i + 1);
    table[i][0] = central(h);
    double factor = 1.0;
    for (int m = 1; m <= i; ++m) {
      factor *= 4.0;
      table[i][m] = (factor * table[i][m - 1] - table[i - 1][m - 1]) / (factor - 1.0);
    }
  }
  return table[levels - 1][levels - 1];
}

PropagatorJet train_propagator_jet(const PulseTrain& t, std::size_t order, const ErrorPoint& at) {
  if (!finite(at.eps) || !finite(at.detuning_shift)) throw InvalidInput("error point is not finite");
  const Jet<double> scale = Jet<double>::variable(order, 1.0 + at.eps);
  PropagatorJet u{Jet<cplx>(order, cplx{1.0, 0.0}), Jet<cplx>(order)};
  for (const auto& p : t.pulses()) {
    const double detuning = p.detuning + at.detuning_shift;
    const Jet<double> rabi = scale * p.rabi;
    const Jet<double> x = rabi * rabi + Jet<double>(order, detuning * detuning);
    Jet<double> c, s;
    area_functions(x, p.duration, c, s);
    const Jet<cplx> a = to_complex(c, 1.0) + to_complex(s, cplx{0.0, detuning});
    const Jet<cplx> b = to_complex(rabi * s, cplx{0.0, -1.0});
    PropagatorJet next{a * u.a - b * conj(u.b), a * u.b + b * conj(u.a)};
    u = std::move(next);
  }
  return u;
}

std::vector<double> probability_taylor(const PulseTrain& t, std::size_t order, const ErrorPoint& at) {
  const PropagatorJet u = train_propagator_jet(t, order, at);
  const Jet<cplx> p = u.b * conj(u.b);
  std::vector<double> out(order + 1);
  for (std::size_t k = 0; k <= order; ++k) out[k] = p[k].real();
  return out;
}

}  // namespace ppt
