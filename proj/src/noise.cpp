#include "ppt/noise.hpp"

#include <algorithm>
#include <cmath>

#include "ppt/errors.hpp"
#include "ppt/parallel.hpp"
#include "ppt/random.hpp"

namespace ppt::noise {

namespace {

using Mat = DensityMatrix;

Mat mul(const Mat& x, const Mat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

Mat axpy(const Mat& x, double s, const Mat& y) {
  return {x[0] + s * y[0], x[1] + s * y[1], x[2] + s * y[2], x[3] + s * y[3]};
}

// Lindblad generator for H = (rabi/2) sx - (detuning/2) sz, damping |1> -> |0>
// at rate g1 and coherence decay g_phi from pure dephasing.
struct Generator {
  double rabi, detuning, g1, gphi;

  Mat operator()(const Mat& r) const {
    const cplx i{0.0, 1.0};
    const Mat h{cplx{-0.5 * detuning}, cplx{0.5 * rabi}, cplx{0.5 * rabi}, cplx{0.5 * detuning}};
    const Mat hr = mul(h, r);
    const Mat rh = mul(r, h);
    Mat d{-i * (hr[0] - rh[0]), -i * (hr[1] - rh[1]), -i * (hr[2] - rh[2]), -i * (hr[3] - rh[3])};
    // amplitude damping
    d[0] += g1 * r[3];
    d[3] -= g1 * r[3];
    d[1] -= 0.5 * g1 * r[1];
    d[2] -= 0.5 * g1 * r[2];
    // pure dephasing
    d[1] -= gphi * r[1];
    d[2] -= gphi * r[2];
    return d;
  }
};

double max_abs(const Mat& m) {
  double v = 0.0;
  for (const auto& c : m) v = std::max(v, std::abs(c));
  return v;
}

// Dormand-Prince 5(4) with standard step control.
Mat integrate(const Generator& f, Mat y, double duration, const IntegratorOptions& opt) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2, (void)c3, (void)c4, (void)c5;  // autonomous within a pulse

  double t = 0.0;
  double h = std::min(duration, 0.05);
  Mat k1 = f(y);
  while (t < duration) {
    if (t + h > duration) h = duration - t;
    if (h < opt.min_step) throw NumericFailure("integrator step size underflow");
    const Mat k2 = f(axpy(y, h * a21, k1));
    Mat s = axpy(axpy(y, h * a31, k1), h * a32, k2);
    const Mat k3 = f(s);
    s = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
    const Mat k4 = f(s);
    s = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54, k4);
    const Mat k5 = f(s);
    s = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3), h * a64, k4), h * a65, k5);
    const Mat k6 = f(s);
    const Mat y5 = axpy(axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5, k5), h * b6, k6);
    const Mat k7 = f(y5);
    Mat err{};
    for (int q = 0; q < 4; ++q) {
      err[q] = h * (e1 * k1[q] + e3 * k3[q] + e4 * k4[q] + e5 * k5[q] + e6 * k6[q] + e7 * k7[q]);
    }
    const double scale = opt.tolerance * (1.0 + std::max(max_abs(y), max_abs(y5)));
    const double ratio = max_abs(err) / scale;
    if (!std::isfinite(ratio)) throw NumericFailure("integrator produced a non-finite state");
    if (ratio <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return y;
}

}  // namespace

NoiseModel NoiseModel::reference_device() {
  NoiseModel nm;
  nm.t1 = 195.52e-6;
  nm.t2 = 232.57e-6;
  nm.readout_error = 0.0347;
  nm.shots = 1024;
  nm.pulse_duration = 100e-9;
  return nm;
}

void NoiseModel::check() const {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw InvalidInput("T1 and T2 must be > 0");
  if (!(t2 <= 2.0 * t1)) throw InvalidInput("T2 must not exceed 2 T1");
  if (!(readout_error >= 0.0 && readout_error < 0.5)) throw InvalidInput("readout error must be in [0, 0.5)");
  if (shots < 1) throw InvalidInput("shots must be >= 1");
  if (!(pulse_duration > 0.0) || !std::isfinite(pulse_duration)) throw InvalidInput("pulse duration must be > 0");
}

double NoiseModel::relaxation_rate() const { return std::isinf(t1) ? 0.0 : pulse_duration / t1; }

double NoiseModel::pure_dephasing_rate() const {
  const double g2 = std::isinf(t2) ? 0.0 : pulse_duration / t2;
  return std::max(0.0, g2 - 0.5 * relaxation_rate());
}

DensityMatrix evolve_density(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, InitialState initial,
                             const IntegratorOptions& opt) {
  nm.check();
  if (e.eps < -1.0) throw InvalidInput("relative Rabi error must be >= -1");
  Mat rho{};
  if (initial == InitialState::Ground) {
    rho[0] = 1.0;
  } else {
    rho[3] = 1.0;
  }
  const double g1 = nm.relaxation_rate();
  const double gphi = nm.pure_dephasing_rate();
  for (const auto& p : train.pulses()) {
    const Generator gen{p.rabi * (1.0 + e.eps), p.detuning + e.detuning_shift, g1, gphi};
    rho = integrate(gen, rho, p.duration, opt);
  }
  return rho;
}

double evolve_noisy(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, InitialState initial,
                    const IntegratorOptions& opt) {
  return std::clamp(evolve_density(train, e, nm, initial, opt)[3].real(), 0.0, 1.0);
}

double readout_expectation(double population, double readout_error) {
  return population * (1.0 - readout_error) + (1.0 - population) * readout_error;
}

double measure(double population, const NoiseModel& nm, std::uint64_t rng_seed) {
  nm.check();
  if (!(population >= 0.0 && population <= 1.0)) throw InvalidInput("population must be in [0, 1]");
  const double q = readout_expectation(population, nm.readout_error);
  auto rng = task_engine(rng_seed, 0);
  long long hits = 0;
  for (int s = 0; s < nm.shots; ++s) {
    if (uniform(rng, 0.0, 1.0) < q) ++hits;
  }
  return static_cast<double>(hits) / nm.shots;
}

NoisyPoint simulate_point(const PulseTrain& train, const ErrorPoint& e, const NoiseModel& nm, std::uint64_t rng_seed) {
  NoisyPoint pt;
  pt.ideal = transition_probability(train, e);
  pt.decohered = evolve_noisy(train, e, nm, InitialState::Ground);
  pt.expected = readout_expectation(pt.decohered, nm.readout_error);
  pt.measured = measure(pt.decohered, nm, rng_seed);
  return pt;
}

NoisyProfile simulate_profile(const PulseTrain& train, const GridSpec& grid, const NoiseModel& nm,
                              std::uint64_t rng_seed, std::string train_id) {
  grid.check();
  nm.check();
  const std::size_t ne = grid.eps_count();
  const std::size_t total = ne * grid.delta_count();
  NoisyProfile out{Profile{grid, std::vector<double>(total), train_id}, Profile{grid, std::vector<double>(total), train_id},
                   Profile{grid, std::vector<double>(total), train_id}};
  parallel_for(total, 0, [&](std::size_t k) {
    const ErrorPoint e{grid.eps_at(k % ne), grid.delta_at(k / ne)};
    const double pop = evolve_noisy(train, e, nm, InitialState::Ground);
    out.decohered.values[k] = pop;
    out.expected.values[k] = readout_expectation(pop, nm.readout_error);
    // distinct stream per grid index
    std::uint64_t point_seed = task_engine(rng_seed, k)();
    out.measured.values[k] = measure(pop, nm, point_seed);
  });
  return out;
}

}  // namespace ppt::noise
