#include "ppt/cost_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "ppt/errors.hpp"
#include "ppt/optimize.hpp"
#include "ppt/parallel.hpp"
#include "ppt/profile.hpp"
#include "ppt/random.hpp"

namespace ppt::synth {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t free_count(Symmetry s, int length) {
  const auto n = static_cast<std::size_t>(length);
  switch (s) {
    case Symmetry::Antisymmetric: return n / 2;
    case Symmetry::Symmetric: return (n + 1) / 2;
    case Symmetry::General: return n;
  }
  return n;
}

void expand_detunings(std::span<const double> params, const SynthesisProblem& prob, std::vector<double>& out) {
  const std::size_t n = static_cast<std::size_t>(prob.length);
  const auto free = params.subspan(1);
  out.resize(n);
  switch (prob.symmetry) {
    case Symmetry::General:
      std::copy(free.begin(), free.end(), out.begin());
      break;
    case Symmetry::Antisymmetric:
      for (std::size_t k = 0; k < n / 2; ++k) {
        out[k] = free[k];
        out[n - 1 - k] = -free[k];
      }
      if (n % 2 == 1) out[n / 2] = 0.0;
      break;
    case Symmetry::Symmetric:
      for (std::size_t k = 0; k < (n + 1) / 2; ++k) {
        out[k] = free[k];
        out[n - 1 - k] = free[k];
      }
      break;
  }
}

double soft_max(std::span<const double> v, double temperature) {
  const double m = *std::max_element(v.begin(), v.end());
  if (temperature <= 0.0) return m;
  double s = 0.0;
  for (double x : v) s += std::exp((x - m) / temperature);
  return m + temperature * std::log(s);
}

// Evaluates one class cost for fixed sampling settings; reusable across calls.
class CostEvaluator {
 public:
  CostEvaluator(const SynthesisProblem& prob, const CostSettings& settings)
      : prob_(prob), temperature_(settings.temperature), level_(settings.level < 0.0 ? prob.alpha : settings.level) {
    switch (prob.profile_class) {
      case ProfileClass::Broadband:
        inner_ = inner_points(prob.eps0, settings.step);
        break;
      case ProfileClass::Narrowband:
        wings_ = wing_points(prob.eps0, settings.step);
        break;
      case ProfileClass::Passband:
        inner_ = inner_points(prob.eps0, settings.step);
        wings_ = wing_points(prob.stopband_start, settings.step);
        break;
      case ProfileClass::DoubleComp2D:
        inner_ = inner_points(prob.eps0, settings.step);
        deltas_ = inner_points(prob.delta0, settings.step * prob.delta0 / prob.eps0);
        break;
    }
  }

  double operator()(std::span<const double> params) {
    const double rabi = std::abs(params[0]);
    expand_detunings(params, prob_, detunings_);
    auto prob_at = [&](double eps, double delta) {
      return compose(rabi, detunings_, 1.0, {eps, delta}).transition_probability();
    };
    const double p = prob_.target_p;
    switch (prob_.profile_class) {
      case ProfileClass::Broadband: {
        fill(inner_, [&](double e) { return std::abs(prob_at(e, 0.0) - p); });
        return square(soft_max(buffer_, temperature_) - level_);
      }
      case ProfileClass::Narrowband: {
        double c = square(prob_at(0.0, 0.0) - p);
        if (p != 1.0) {
          const PulseTrain t = PulseTrain::from_detunings(rabi, detunings_);
          c += square(probability_taylor(t, 1)[1]);
        }
        fill(wings_, [&](double e) { return prob_at(e, 0.0); });
        return c + square(soft_max(buffer_, temperature_) - level_);
      }
      case ProfileClass::Passband: {
        fill(inner_, [&](double e) { return std::abs(prob_at(e, 0.0) - p); });
        const double inner = square(soft_max(buffer_, temperature_) - level_);
        fill(wings_, [&](double e) { return prob_at(e, 0.0); });
        return inner + square(soft_max(buffer_, temperature_) - level_);
      }
      case ProfileClass::DoubleComp2D: {
        buffer_.clear();
        for (double d : deltas_) {
          for (double e : inner_) buffer_.push_back(std::abs(prob_at(e, d) - p));
        }
        return square(soft_max(buffer_, temperature_) - level_);
      }
    }
    return 0.0;
  }

 private:
  static double square(double x) { return x * x; }

  template <typename F>
  void fill(const std::vector<double>& pts, F f) {
    buffer_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) buffer_[i] = f(pts[i]);
  }

  const SynthesisProblem& prob_;
  double temperature_;
  double level_;
  std::vector<double> inner_, wings_, deltas_;
  std::vector<double> detunings_;
  std::vector<double> buffer_;
};

void require_class(const SynthesisProblem& prob, ProfileClass c) {
  prob.check();
  if (prob.profile_class != c) throw InvalidInput(std::string("problem class is not ") + to_string(c));
}

// Global detuning sign flip leaves p(eps) invariant; pick first non-zero free detuning >= 0.
std::vector<double> canonical_params(std::span<const double> params) {
  std::vector<double> x(params.begin(), params.end());
  x[0] = std::abs(x[0]);
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (x[k] == 0.0) continue;
    if (x[k] < 0.0) {
      for (std::size_t j = 1; j < x.size(); ++j) x[j] = -x[j];
    }
    break;
  }
  return x;
}

}  // namespace

const char* to_string(ProfileClass c) {
  switch (c) {
    case ProfileClass::Broadband: return "broadband";
    case ProfileClass::Narrowband: return "narrowband";
    case ProfileClass::Passband: return "passband";
    case ProfileClass::DoubleComp2D: return "double2d";
  }
  return "broadband";
}

ProfileClass profile_class_from_string(const std::string& s) {
  if (s == "broadband" || s == "bb") return ProfileClass::Broadband;
  if (s == "narrowband" || s == "nb") return ProfileClass::Narrowband;
  if (s == "passband" || s == "pb") return ProfileClass::Passband;
  if (s == "double2d" || s == "2d") return ProfileClass::DoubleComp2D;
  throw InvalidInput("unknown profile class '" + s + "'");
}

SynthesisProblem SynthesisProblem::make(ProfileClass c, double target_p, int length, double eps0, double alpha) {
  SynthesisProblem p;
  p.profile_class = c;
  p.target_p = target_p;
  p.length = length;
  p.eps0 = eps0;
  p.alpha = alpha;
  switch (c) {
    case ProfileClass::Broadband:
      p.symmetry = target_p == 1.0 ? Symmetry::Antisymmetric : Symmetry::General;
      break;
    case ProfileClass::Narrowband: p.symmetry = Symmetry::Symmetric; break;
    case ProfileClass::Passband: p.symmetry = Symmetry::General; break;
    case ProfileClass::DoubleComp2D: p.symmetry = Symmetry::Antisymmetric; break;
  }
  p.delta0 = eps0 * kPi;
  p.stopband_start = 1.0 - eps0;
  p.check();
  return p;
}

void SynthesisProblem::check() const {
  if (!(target_p > 0.0 && target_p <= 1.0)) throw InvalidInput("target probability must be in (0, 1]");
  if (length < 2) throw InvalidInput("train length must be >= 2");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw InvalidInput("bandwidth eps0 must be in (0, 1)");
  if (!(alpha > 0.0)) throw InvalidInput("error level alpha must be > 0");
  if (profile_class == ProfileClass::DoubleComp2D) {
    if (symmetry != Symmetry::Antisymmetric) throw InvalidInput("2D compensation uses antisymmetric trains");
    if (!(delta0 > 0.0)) throw InvalidInput("delta0 must be > 0");
  }
  if (profile_class == ProfileClass::Passband && !(stopband_start >= eps0 && stopband_start < 1.0)) {
    throw InvalidInput("stopband must start in [eps0, 1)");
  }
}

std::size_t SynthesisProblem::parameter_count() const { return 1 + free_count(symmetry, length); }

PulseTrain train_from_params(std::span<const double> params, const SynthesisProblem& prob) {
  if (params.size() != prob.parameter_count()) throw InvalidInput("wrong parameter count for problem");
  std::vector<double> d;
  expand_detunings(params, prob, d);
  return PulseTrain::from_detunings(std::abs(params[0]), d, prob.symmetry);
}

std::vector<double> params_from_train(const PulseTrain& train, const SynthesisProblem& prob) {
  if (static_cast<int>(train.size()) != prob.length) throw InvalidInput("train length does not match problem");
  const std::vector<double> d = train.detunings();
  std::vector<double> x{train.rabi()};
  const std::size_t nf = free_count(prob.symmetry, prob.length);
  x.insert(x.end(), d.begin(), d.begin() + static_cast<std::ptrdiff_t>(nf));
  // Reject trains that do not have the problem's symmetry.
  const PulseTrain rebuilt = train_from_params(x, prob);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(rebuilt.pulses()[k].detuning - d[k]) > 1e-12 * std::max(1.0, std::abs(d[k]))) {
      throw InvalidInput("train does not have the problem's symmetry");
    }
  }
  return x;
}

std::vector<double> inner_points(double eps0, double step) {
  const int k_max = static_cast<int>(std::floor(eps0 / step + 1e-9));
  std::vector<double> pts;
  const bool ends = eps0 - k_max * step > 1e-9;
  if (ends) pts.push_back(-eps0);
  for (int k = -k_max; k <= k_max; ++k) pts.push_back(k * step);
  if (ends) pts.push_back(eps0);
  return pts;
}

std::vector<double> wing_points(double start, double step) {
  std::vector<double> side;
  for (int k = 0;; ++k) {
    const double e = start + k * step;
    if (e > 1.0 + 1e-9) break;
    side.push_back(std::min(e, 1.0));
  }
  if (side.empty() || side.back() < 1.0 - 1e-9) side.push_back(1.0);
  std::vector<double> pts;
  for (auto it = side.rbegin(); it != side.rend(); ++it) pts.push_back(-*it);
  pts.insert(pts.end(), side.begin(), side.end());
  return pts;
}

double cost(std::span<const double> params, const SynthesisProblem& prob, const CostSettings& settings) {
  prob.check();
  if (params.size() != prob.parameter_count()) throw InvalidInput("wrong parameter count for problem");
  CostEvaluator eval(prob, settings);
  return eval(params);
}

double cost_bb(std::span<const double> params, const SynthesisProblem& prob) {
  require_class(prob, ProfileClass::Broadband);
  return cost(params, prob, {});
}

double cost_nb(std::span<const double> params, const SynthesisProblem& prob) {
  require_class(prob, ProfileClass::Narrowband);
  return cost(params, prob, {});
}

double cost_pb(std::span<const double> params, const SynthesisProblem& prob) {
  require_class(prob, ProfileClass::Passband);
  return cost(params, prob, {});
}

double cost_2d(std::span<const double> params, const SynthesisProblem& prob) {
  require_class(prob, ProfileClass::DoubleComp2D);
  return cost(params, prob, {});
}

double max_deviation(const PulseTrain& train, std::span<const double> eps, std::span<const double> delta,
                     double target) {
  double m = 0.0;
  for (double d : delta) {
    for (double e : eps) m = std::max(m, std::abs(transition_probability(train, {e, d}) - target));
  }
  return m;
}

SynthesisResult validate(const PulseTrain& train, const SynthesisProblem& prob, const ValidateOptions& opt) {
  prob.check();
  const std::vector<double> params = params_from_train(train, prob);
  SynthesisResult r{.train = train};
  r.cost_value = cost(params, prob, {});
  r.center_value = transition_probability(train);
  r.center_slope = probability_taylor(train, 1)[1];

  const Profile prof = sweep_1d(train, GridSpec::eps_only(-1.0, 1.0, opt.step));
  const double alpha = prob.alpha;
  const double slack = 1e-9;
  const BandResult bb = band_at_level(prof, prob.target_p, alpha, BandMode::Inner);
  const BandResult nb = band_at_level(prof, prob.target_p, alpha, BandMode::Outer);
  r.measured_bb_band = bb.value;
  r.measured_nb_band = nb.value;

  switch (prob.profile_class) {
    case ProfileClass::Broadband:
      r.validated = bb.attained && bb.value >= prob.eps0 - slack;
      break;
    case ProfileClass::Narrowband:
      r.validated = std::abs(r.center_value - prob.target_p) <= alpha && nb.attained && nb.value <= prob.eps0 + slack;
      if (prob.target_p != 1.0) r.validated = r.validated && std::abs(r.center_slope) <= opt.center_slope_tolerance;
      break;
    case ProfileClass::Passband:
      r.validated = bb.attained && bb.value >= prob.eps0 - slack && nb.attained &&
                    nb.value <= prob.stopband_start + slack;
      break;
    case ProfileClass::DoubleComp2D: {
      const std::vector<double> eps = inner_points(prob.eps0, opt.step);
      const std::vector<double> delta = inner_points(prob.delta0, opt.step * prob.delta0 / prob.eps0);
      r.max_2d_deviation = max_deviation(train, eps, delta, prob.target_p);
      r.validated = r.max_2d_deviation <= alpha;
      break;
    }
  }
  return r;
}

MinimizeReport minimize(const SynthesisProblem& prob, int seeds, std::uint64_t rng_seed, const MinimizeOptions& opt) {
  prob.check();
  if (seeds < 1) throw InvalidInput("seeds must be >= 1");
  const std::size_t dim = prob.parameter_count();
  const double scale = 1.0 / (prob.alpha * prob.alpha);
  const double level = opt.level_fraction * prob.alpha;

  struct Slot {
    std::optional<SynthesisResult> result;
    int iterations = 0;
    int evaluations = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(seeds));

  parallel_for(slots.size(), opt.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    auto rng = task_engine(rng_seed, i);
    opt::Vector x(static_cast<Eigen::Index>(dim));
    x[0] = 2.0 * kPi - uniform(rng, 0.0, 2.0 * kPi);
    for (std::size_t k = 1; k < dim; ++k) x[static_cast<Eigen::Index>(k)] = uniform(rng, -2.0 * kPi, 2.0 * kPi);

    auto run = [&](double step, double temperature) {
      CostEvaluator eval(prob, {step, temperature, level});
      opt::BfgsOptions bo;
      bo.max_iterations = opt.max_iterations;
      const auto res = opt::bfgs(
          [&](const opt::Vector& v) { return scale * eval(std::span<const double>(v.data(), dim)); }, x, bo);
      slot.iterations += res.iterations;
      slot.evaluations += res.evaluations;
      if (res.x.allFinite()) x = res.x;
      return res.value;
    };

    try {
      double value = 0.0;
      for (double t : opt.coarse_temperatures) value = run(opt.coarse_step, t);
      // Hopeless starts (several alpha off after the coarse rounds) skip the polish.
      if (!(value <= 25.0)) return;
      for (double frac : opt.polish_temperature_fractions) run(opt.polish_step, frac * prob.alpha);
      const std::vector<double> params = canonical_params(std::span<const double>(x.data(), dim));
      SynthesisResult r = validate(train_from_params(params, prob), prob, opt.validation);
      r.diagnostics = {static_cast<int>(i), slot.iterations, slot.evaluations};
      if (r.validated) slot.result = std::move(r);
    } catch (const std::exception&) {
      // non-finite iterate or degenerate train: drop this start
    }
  });

  MinimizeReport report;
  report.seeds = seeds;
  for (auto& slot : slots) {
    report.iterations += slot.iterations;
    report.evaluations += slot.evaluations;
    if (!slot.result) continue;
    ++report.validated;
    const auto px = params_from_train(slot.result->train, prob);
    const bool duplicate = std::any_of(report.results.begin(), report.results.end(), [&](const SynthesisResult& e) {
      const auto py = params_from_train(e.train, prob);
      double d = 0.0;
      for (std::size_t k = 0; k < px.size(); ++k) d = std::max(d, std::abs(px[k] - py[k]));
      return d <= opt.dedup_distance;
    });
    if (!duplicate) report.results.push_back(std::move(*slot.result));
  }

  const bool nb_rank = prob.profile_class == ProfileClass::Narrowband;
  std::stable_sort(report.results.begin(), report.results.end(), [&](const SynthesisResult& a, const SynthesisResult& b) {
    const double ea = a.train.total_area(), eb = b.train.total_area();
    if (ea != eb) return ea < eb;
    if (nb_rank && a.measured_nb_band != b.measured_nb_band) return a.measured_nb_band < b.measured_nb_band;
    if (!nb_rank && a.measured_bb_band != b.measured_bb_band) return a.measured_bb_band > b.measured_bb_band;
    return a.cost_value < b.cost_value;
  });
  return report;
}

}  // namespace ppt::synth
