#pragma once

// Two-level dynamics with amplitude damping, pure dephasing, symmetric
// readout assignment error and finite-shot sampling.

#include <array>
#include <cstdint>
#include <limits>

#include "ppt/profile.hpp"
#include "ppt/su2.hpp"

namespace ppt::noise {

struct NoiseModel {
  double t1 = std::numeric_limits<double>::infinity();  // seconds
  double t2 = std::numeric_limits<double>::infinity();  // seconds
  double readout_error = 0.0;
  int shots = 1024;
  double pulse_duration = 100e-9;  // seconds per unit duration

  // Calibration of the reference single-transmon device. Qubit frequency
  // (4.972 GHz) and anharmonicity (-0.34719 GHz) do not enter the rotating-frame model.
  static NoiseModel reference_device();

  // Throws InvalidInput unless t1, t2 > 0, t2 <= 2 t1, readout_error in [0, 0.5), shots >= 1.
  void check() const;

  // Rates in units of 1 / pulse_duration.
  double relaxation_rate() const;
  double pure_dephasing_rate() const;
};

enum class InitialState { Ground, Excited };

// 2x2 density matrix, row-major, index 0 = ground, 1 = excited.
using DensityMatrix = std::array<cplx, 4>;

struct IntegratorOptions {
  double tolerance = 1e-10;
  double min_step = 1e-14;
};

// Integrates the Lindblad equation through the train (each pulse re-initialises
// the piecewise-constant generator) and returns the final density matrix.
// Throws NumericFailure on step-size underflow.
DensityMatrix evolve_density(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, InitialState initial,
                             const IntegratorOptions& opt = {});

// Excited-state population after the train.
double evolve_noisy(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, InitialState initial,
                    const IntegratorOptions& opt = {});

// Probability of reading "excited" given the true population: p(1-r) + (1-p) r.
double readout_expectation(double population, double readout_error);

// Readout flip followed by binomial sampling over nm.shots; returns the observed fraction.
double measure(double population, const NoiseModel& nm, std::uint64_t rng_seed);

// Separate contributions at one error point.
struct NoisyPoint {
  double ideal = 0.0;       // exact unitary transition probability
  double decohered = 0.0;   // after relaxation and dephasing
  double expected = 0.0;    // readout_expectation(decohered)
  double measured = 0.0;    // finite-shot sample
};

NoisyPoint simulate_point(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, std::uint64_t rng_seed);

struct NoisyProfile {
  Profile measured;   // sampled observed fractions
  Profile expected;   // shot-noise-free readout expectation
  Profile decohered;  // populations before readout
};

// Per-point seeds are derived from (rng_seed, grid index).
NoisyProfile simulate_profile(const PulseTrain& train, const GridSpec& grid, const NoiseModel& nm,
                              std::uint64_t rng_seed, std::string train_id = {});

}  // namespace ppt::noise
