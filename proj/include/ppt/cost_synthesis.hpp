#pragma once

// Cost-function synthesis of broadband (BB), narrowband (NB), passband (PB)
// and doubly compensated (2D) trains by multistart quasi-Newton minimisation.
//
// Optimisation runs on a softmax-smoothed surrogate of the max-based costs
// with a decreasing temperature, first on the coarse eps grid (step 0.1) and
// then on a refined polish grid. Every candidate is validated on a fine grid
// against the exact class predicate.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppt/su2.hpp"

namespace ppt::synth {

enum class ProfileClass { Broadband, Narrowband, Passband, DoubleComp2D };

const char* to_string(ProfileClass c);
ProfileClass profile_class_from_string(const std::string& s);

struct SynthesisProblem {
  ProfileClass profile_class = ProfileClass::Broadband;
  double target_p = 1.0;
  int length = 4;
  double eps0 = 0.2;   // bandwidth
  double alpha = 1e-4; // admissible probability error
  Symmetry symmetry = Symmetry::Antisymmetric;
  double delta0 = 0.0;          // DoubleComp2D: detuning half-span in rad per unit duration
  double stopband_start = 0.0;  // Passband: |eps| from which the wings must stay below alpha

  // Fills the class-default symmetry, delta0 = eps0 * pi and stopband_start = 1 - eps0.
  static SynthesisProblem make(ProfileClass c, double target_p, int length, double eps0, double alpha);

  // Throws InvalidInput on out-of-range fields.
  void check() const;
  std::size_t parameter_count() const;
};

// params = [rabi, free detunings...] in rad per unit duration; rabi enters as |rabi|.
PulseTrain train_from_params(std::span<const double> params, const SynthesisProblem& prob);
std::vector<double> params_from_train(const PulseTrain& train, const SynthesisProblem& prob);

// Error-axis samples used by the costs: [-e0, e0] and the wings [start, 1] (both signs),
// stepped from the centre / inner edge outwards with the ends always included.
std::vector<double> inner_points(double eps0, double step);
std::vector<double> wing_points(double start, double step);

struct CostSettings {
  double step = 0.1;
  double temperature = 0.0;  // 0: exact max, otherwise log-sum-exp smoothing
  double level = -1.0;       // < 0: use prob.alpha
};

// Class-dispatching cost with explicit settings.
double cost(std::span<const double> params, const SynthesisProblem& prob, const CostSettings& settings);

// [max |p(eps) - p| - alpha]^2 over eps in [-eps0, eps0], step 0.1.
double cost_bb(std::span<const double> params, const SynthesisProblem& prob);
// [p(0) - p]^2 + (dp/deps(0))^2 + [max p(eps) - alpha]^2 over the wings [eps0, 1];
// the derivative term is dropped for p = 1.
double cost_nb(std::span<const double> params, const SynthesisProblem& prob);
// BB term over [-eps0, eps0] plus wing term over [stopband_start, 1].
double cost_pb(std::span<const double> params, const SynthesisProblem& prob);
// BB term maximised over the (eps, delta) lattice [-eps0, eps0] x [-delta0, delta0].
double cost_2d(std::span<const double> params, const SynthesisProblem& prob);

// max |p - target| over an explicit lattice.
double max_deviation(const PulseTrain& train, std::span<const double> eps, std::span<const double> delta,
                     double target);

struct SynthesisDiagnostics {
  int seed_index = -1;
  int iterations = 0;
  int evaluations = 0;
};

struct SynthesisResult {
  PulseTrain train;
  double cost_value = 0.0;
  bool validated = false;
  double measured_bb_band = 0.0;  // widest symmetric band with |p - target| <= alpha
  double measured_nb_band = 0.0;  // innermost |eps| beyond which p <= alpha
  double center_value = 0.0;      // p at eps = 0 (and delta = 0)
  double center_slope = 0.0;      // dp/deps at eps = 0
  double max_2d_deviation = 0.0;  // DoubleComp2D only
  SynthesisDiagnostics diagnostics{};
};

struct ValidateOptions {
  double step = 1e-3;
  // Narrowband with target p < 1 must also have a stationary centre.
  double center_slope_tolerance = 1e-6;
};

SynthesisResult validate(const PulseTrain& train, const SynthesisProblem& prob, const ValidateOptions& opt = {});

struct MinimizeOptions {
  double coarse_step = 0.1;
  double polish_step = 0.01;
  std::vector<double> coarse_temperatures{1e-2, 1e-3, 1e-4};
  std::vector<double> polish_temperature_fractions{0.1, 0.01};  // times alpha
  double level_fraction = 0.9;  // optimise towards level_fraction * alpha
  int max_iterations = 300;
  unsigned threads = 0;
  double dedup_distance = 1e-6;
  ValidateOptions validation;
};

struct MinimizeReport {
  std::vector<SynthesisResult> results;  // validated only, ranked
  int seeds = 0;
  int validated = 0;
  long long evaluations = 0;
  int iterations = 0;
};

MinimizeReport minimize(const SynthesisProblem& prob, int seeds, std::uint64_t rng_seed,
                        const MinimizeOptions& opt = {});

}  // namespace ppt::synth
