#pragma once

// Exact two-level dynamics for trains of rectangular pulses.
//
// Units: rabi and detuning are angular frequencies in rad per unit duration;
// durations are in the same time unit. The Hamiltonian of a pulse is
//   H = (rabi/2) sigma_x - (detuning/2) sigma_z,
// and its propagator is stored as the Cayley-Klein pair (a, b) of
//   U = [[a, b], [-conj(b), conj(a)]].

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ppt/jet.hpp"

namespace ppt {

using cplx = std::complex<double>;

struct Pulse {
  double rabi = 0.0;
  double detuning = 0.0;
  double duration = 1.0;
};

// Throws InvalidInput unless rabi >= 0, duration > 0 and all fields are finite.
void check_pulse(const Pulse& p);

// Relative Rabi error eps and absolute detuning shift delta.
struct ErrorPoint {
  double eps = 0.0;
  double detuning_shift = 0.0;
};

struct Propagator {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  static Propagator identity() { return {}; }

  // this * rhs, i.e. rhs acts first.
  Propagator operator*(const Propagator& rhs) const {
    return {a * rhs.a - b * std::conj(rhs.b), a * rhs.b + b * std::conj(rhs.a)};
  }

  double transition_probability() const { return std::norm(b); }
  double unitarity_defect() const { return std::abs(std::norm(a) + std::norm(b) - 1.0); }
};

enum class Symmetry { General, Symmetric, Antisymmetric };

const char* to_string(Symmetry s);
Symmetry symmetry_from_string(const std::string& s);

// Ordered pulses, leftmost applied first, sharing one Rabi frequency and duration.
class PulseTrain {
 public:
  // Validates the shared-amplitude and symmetry invariants; throws InvalidInput.
  PulseTrain(std::vector<Pulse> pulses, Symmetry symmetry = Symmetry::General);

  // Convenience: equal-amplitude train from a detuning list.
  static PulseTrain from_detunings(double rabi, std::span<const double> detunings,
                                   Symmetry symmetry = Symmetry::General, double duration = 1.0);

  // Antisymmetric train {d1..dn, [0,] -dn..-d1}; the middle zero is present iff length is odd.
  static PulseTrain antisymmetric(double rabi, std::span<const double> free_detunings,
                                  std::size_t length, double duration = 1.0);
  // Symmetric train {d1..dn, [m,] dn..d1}; for odd length the last free detuning is the middle pulse.
  static PulseTrain symmetric(double rabi, std::span<const double> free_detunings,
                              std::size_t length, double duration = 1.0);

  const std::vector<Pulse>& pulses() const { return pulses_; }
  Symmetry symmetry() const { return symmetry_; }
  std::size_t size() const { return pulses_.size(); }
  double rabi() const { return pulses_.front().rabi; }
  double duration() const { return pulses_.front().duration; }
  std::vector<double> detunings() const;

  // Nominal on-resonance area sum N * rabi * duration.
  double total_area() const;

 private:
  std::vector<Pulse> pulses_;
  Symmetry symmetry_;
};

// Branch threshold for the Lambda -> 0 limit (Lambda * T below this is the identity).
inline constexpr double kZeroAreaThreshold = 1e-12;

Propagator pulse_propagator(const Pulse& p);

// Throws InvalidInput when eps <= -1.
Pulse apply_error(const Pulse& p, const ErrorPoint& e);

// U(pulse N) ... U(pulse 1), each pulse error-shifted by e.
Propagator train_propagator(const PulseTrain& t, const ErrorPoint& e = {});

double transition_probability(const PulseTrain& t, const ErrorPoint& e = {});

// Same as above for an equal-amplitude train given as raw detunings; skips
// the PulseTrain invariant checks (rabi may carry either sign). Hot-path helper.
Propagator compose(double rabi, std::span<const double> detunings, double duration, const ErrorPoint& e);

struct DerivativeOptions {
  double base_step = 1e-3;
  int richardson_levels = 3;  // step sequence h, h/2, h/4, ...
};

inline constexpr int kMaxDerivativeOrder = 6;

// Central finite-difference estimate of d^order P / d eps^order at `at`,
// refined by Richardson extrapolation over successive step halvings.
// The difference is taken on whichever of |b|^2 or 1-|a|^2 is smaller so that
// rounding in values near P = 1 does not dominate.
double probability_derivative(const PulseTrain& t, int order, const ErrorPoint& at = {},
                              const DerivativeOptions& opt = {});

// Taylor coefficients in eps of the composed Cayley-Klein pair at `at`.
struct PropagatorJet {
  Jet<cplx> a;
  Jet<cplx> b;
};

PropagatorJet train_propagator_jet(const PulseTrain& t, std::size_t order, const ErrorPoint& at = {});

// Taylor coefficients of P(eps) = |b(eps)|^2 around `at` (eps real).
std::vector<double> probability_taylor(const PulseTrain& t, std::size_t order, const ErrorPoint& at = {});

}  // namespace ppt
