#include "ppt/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ppt/catalog.hpp"
#include "ppt/cost_synthesis.hpp"
#include "ppt/deriv_solver.hpp"
#include "ppt/errors.hpp"
#include "ppt/noise.hpp"
#include "ppt/profile.hpp"

namespace ppt::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return format_number(v); }

std::string list_pi(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + fmt(v[k] / kPi);
  return s;
}

struct Common {
  std::string catalog_path;
  std::string unit = "pi";
};

std::vector<catalog::CatalogEntry> open_catalog(const Common& c) {
  return catalog::load_catalog(c.catalog_path.empty() ? catalog::default_catalog_path() : std::filesystem::path(c.catalog_path));
}

// Either a catalog id or an explicit (rabi; detunings) in pi/T units.
struct TrainSource {
  std::string id;
  double rabi = -1.0;
  std::vector<double> detunings;

  void add_options(CLI::App* app) {
    app->add_option("--id", id, "Catalog entry id");
    app->add_option("--rabi", rabi, "Rabi frequency (pi/T units) for an ad-hoc train");
    app->add_option("--detunings", detunings, "Detunings (pi/T units) for an ad-hoc train");
  }

  std::pair<PulseTrain, std::string> resolve(const Common& c) const {
    if (!id.empty()) {
      const auto entries = open_catalog(c);
      const auto* e = catalog::find(entries, id);
      if (!e) throw UsageError("no catalog entry with id '" + id + "'");
      return {e->train, id};
    }
    if (rabi < 0.0 || detunings.empty()) throw UsageError("give --id or both --rabi and --detunings");
    std::vector<double> d = detunings;
    for (double& v : d) v *= kPi;
    return {PulseTrain::from_detunings(rabi * kPi, d), "adhoc"};
  }

  std::string repro() const {
    if (!id.empty()) return " --id " + id;
    std::string s = " --rabi " + fmt(rabi) + " --detunings";
    for (double d : detunings) s += " " + fmt(d);
    return s;
  }
};

void write_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write '" + path + "'");
  body(os);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polychromatic pulse train synthesis and analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--catalog", common.catalog_path, "Catalog file (default: $PPT_CATALOG or shipped fixtures)");
  app.add_option("--unit", common.unit, "Unit for rabi/detuning values (only 'pi' = pi/T)")
      ->check(CLI::IsMember({"pi"}));

  // derive
  auto* derive = app.add_subcommand("derive", "Derivative-based broadband synthesis");
  double d_target = 1.0, d_tol = 1e-10;
  int d_n = 1, d_seeds = 200, d_top = 10;
  std::uint64_t d_rng = 0;
  std::string d_save;
  derive->add_option("--target", d_target, "Target transition probability");
  derive->add_option("--n", d_n, "Number of free detunings (train length 2n+1)");
  derive->add_option("--seeds", d_seeds, "Multistart seeds");
  derive->add_option("--rng-seed", d_rng, "RNG seed");
  derive->add_option("--tol", d_tol, "Residual tolerance");
  derive->add_option("--top", d_top, "Number of solutions to print");
  derive->add_option("--save", d_save, "Write solutions to a catalog file");

  // synthesize
  auto* synthesize = app.add_subcommand("synthesize", "Cost-function synthesis (BFGS multistart)");
  std::string s_class = "bb";
  double s_target = 1.0, s_eps0 = 0.2, s_alpha = 1e-4, s_delta0 = -1.0, s_stop = -1.0;
  int s_n = 4, s_seeds = 100, s_top = 5;
  std::uint64_t s_rng = 0;
  std::string s_save;
  synthesize->add_option("--class", s_class, "bb | nb | pb | 2d");
  synthesize->add_option("--target", s_target, "Target transition probability");
  synthesize->add_option("--n", s_n, "Train length N");
  synthesize->add_option("--eps0", s_eps0, "Bandwidth eps0");
  synthesize->add_option("--alpha", s_alpha, "Probability error level");
  synthesize->add_option("--delta0", s_delta0, "2D detuning half-span (pi/T units, default eps0)");
  synthesize->add_option("--stopband", s_stop, "Passband stopband start (default 1 - eps0)");
  synthesize->add_option("--seeds", s_seeds, "Multistart seeds");
  synthesize->add_option("--rng-seed", s_rng, "RNG seed");
  synthesize->add_option("--top", s_top, "Number of results to print");
  synthesize->add_option("--save", s_save, "Write validated results to a catalog file");

  // profile
  auto* profile = app.add_subcommand("profile", "1D excitation profile over eps");
  TrainSource p_src;
  p_src.add_options(profile);
  std::string p_out;
  double p_step = 2e-3, p_lo = -1.0, p_hi = 1.0;
  profile->add_option("--out", p_out, "CSV output path (default: stdout)");
  profile->add_option("--eps-step", p_step, "eps grid step");
  profile->add_option("--eps-min", p_lo, "eps lower bound");
  profile->add_option("--eps-max", p_hi, "eps upper bound");

  // profile2d
  auto* profile2d = app.add_subcommand("profile2d", "2D (eps, delta) map");
  TrainSource q_src;
  q_src.add_options(profile2d);
  std::string q_out;
  double q_eps_step = 0.01, q_delta_max = 2.0, q_delta_step = 0.02;
  profile2d->add_option("--out", q_out, "CSV output path (default: stdout)");
  profile2d->add_option("--eps-step", q_eps_step, "eps grid step over [-1, 1]");
  profile2d->add_option("--delta-max", q_delta_max, "delta half-span (pi/T units)");
  profile2d->add_option("--delta-step", q_delta_step, "delta step (pi/T units)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Noisy-qubit emulation of a profile measurement");
  TrainSource m_src;
  m_src.add_options(simulate);
  noise::NoiseModel nm = noise::NoiseModel::reference_device();
  double t1_us = nm.t1 * 1e6, t2_us = nm.t2 * 1e6, pulse_ns = nm.pulse_duration * 1e9;
  double m_step = 0.01;
  std::uint64_t m_rng = 0;
  std::string m_out;
  simulate->add_option("--shots", nm.shots, "Shots per point");
  simulate->add_option("--rng-seed", m_rng, "RNG seed");
  simulate->add_option("--t1", t1_us, "T1 in microseconds");
  simulate->add_option("--t2", t2_us, "T2 in microseconds");
  simulate->add_option("--readout", nm.readout_error, "Readout assignment error");
  simulate->add_option("--pulse-ns", pulse_ns, "Pulse duration in nanoseconds");
  simulate->add_option("--eps-step", m_step, "eps grid step over [-1, 1]");
  simulate->add_option("--out", m_out, "CSV output path (default: stdout)");

  // validate
  auto* validate = app.add_subcommand("validate", "Re-validate catalog entries");
  std::string v_id;
  validate->add_option("--id", v_id, "Entry id (default: all)");

  // catalog
  auto* cat = app.add_subcommand("catalog", "Inspect the catalog");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "List entries");
  auto* cat_show = cat->add_subcommand("show", "Show one entry");
  std::string c_id;
  cat_show->add_option("--id", c_id, "Entry id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto catalog_flag = [&] { return common.catalog_path.empty() ? std::string{} : " --catalog " + common.catalog_path; };

  try {
    if (derive->parsed()) {
      deriv::DerivProblem prob{d_target, d_n, d_tol};
      out << "# repro: derive --target " << fmt(d_target) << " --n " << d_n << " --seeds " << d_seeds
          << " --rng-seed " << d_rng << " --tol " << fmt(d_tol) << " --unit pi\n";
      const auto report = deriv::solve(prob, d_seeds, d_rng);
      out << "seeds=" << report.seeds << " converged=" << report.converged
          << " distinct=" << report.solutions.size() << '\n';
      std::vector<catalog::CatalogEntry> entries;
      for (std::size_t k = 0; k < report.solutions.size(); ++k) {
        const auto& s = report.solutions[k];
        double worst = 0.0;
        for (double r : s.residuals) worst = std::max(worst, std::abs(r));
        for (double r : s.conditions) worst = std::max(worst, std::abs(r));
        if (static_cast<int>(k) < d_top) {
          out << "solution " << k << ": rabi=" << fmt(s.rabi / kPi) << " detunings=[" << list_pi(s.detunings)
              << "] area=" << fmt(s.total_area / kPi) << " max_residual=" << fmt(worst) << '\n';
        }
        if (!d_save.empty()) {
          std::ostringstream id;
          id << "DERIV-N" << 2 * d_n + 1 << "-p" << fmt(d_target) << "-s" << d_rng << "-" << k;
          entries.push_back(catalog::from_deriv(id.str(), s, prob, "derived by multistart root finding"));
        }
      }
      if (!d_save.empty()) catalog::save_catalog(entries, d_save);
      return report.solutions.empty() ? 1 : 0;
    }

    if (synthesize->parsed()) {
      auto prob = synth::SynthesisProblem::make(synth::profile_class_from_string(s_class), s_target, s_n, s_eps0,
                                                s_alpha);
      if (s_delta0 > 0.0) prob.delta0 = s_delta0 * kPi;
      if (s_stop > 0.0) prob.stopband_start = s_stop;
      prob.check();
      out << "# repro: synthesize --class " << synth::to_string(prob.profile_class) << " --target " << fmt(s_target)
          << " --n " << s_n << " --eps0 " << fmt(s_eps0) << " --alpha " << fmt(s_alpha) << " --delta0 "
          << fmt(prob.delta0 / kPi) << " --stopband " << fmt(prob.stopband_start) << " --seeds " << s_seeds
          << " --rng-seed " << s_rng << " --unit pi\n";
      const auto report = synth::minimize(prob, s_seeds, s_rng);
      out << "seeds=" << report.seeds << " validated=" << report.validated << " distinct=" << report.results.size()
          << " iterations=" << report.iterations << " evaluations=" << report.evaluations << '\n';
      std::vector<catalog::CatalogEntry> entries;
      for (std::size_t k = 0; k < report.results.size(); ++k) {
        const auto& r = report.results[k];
        if (static_cast<int>(k) < s_top) {
          out << "result " << k << ": rabi=" << fmt(r.train.rabi() / kPi) << " detunings=["
              << list_pi(r.train.detunings()) << "] cost=" << fmt(r.cost_value)
              << " bb_band=" << fmt(r.measured_bb_band) << " nb_band=" << fmt(r.measured_nb_band)
              << " center=" << fmt(r.center_value) << " seed_index=" << r.diagnostics.seed_index << '\n';
        }
        if (!s_save.empty()) {
          std::ostringstream id;
          id << "SYN-" << synth::to_string(prob.profile_class) << "-N" << s_n << "-p" << fmt(s_target) << "-s"
             << s_rng << "-" << k;
          entries.push_back(catalog::from_synthesis(id.str(), r, prob, "derived by multistart BFGS"));
        }
      }
      if (!s_save.empty()) catalog::save_catalog(entries, s_save);
      return report.results.empty() ? 1 : 0;
    }

    if (profile->parsed()) {
      const auto [train, id] = p_src.resolve(common);
      out << "# repro: profile" << p_src.repro() << " --eps-step " << fmt(p_step) << " --eps-min " << fmt(p_lo)
          << " --eps-max " << fmt(p_hi) << catalog_flag() << " --unit pi\n";
      const Profile prof = sweep_1d(train, GridSpec::eps_only(p_lo, p_hi, p_step), id);
      if (p_out.empty()) {
        write_csv(out, prof);
      } else {
        write_output(p_out, [&](std::ostream& os) { write_csv(os, prof); });
        out << "center p=" << fmt(transition_probability(train)) << " wrote " << p_out << '\n';
      }
      return 0;
    }

    if (profile2d->parsed()) {
      const auto [train, id] = q_src.resolve(common);
      out << "# repro: profile2d" << q_src.repro() << " --eps-step " << fmt(q_eps_step) << " --delta-max "
          << fmt(q_delta_max) << " --delta-step " << fmt(q_delta_step) << catalog_flag() << " --unit pi\n";
      const GridSpec grid = GridSpec::eps_delta(-1.0, 1.0, q_eps_step, -q_delta_max * kPi, q_delta_max * kPi,
                                                q_delta_step * kPi);
      const Profile prof = sweep_2d(train, grid, id);
      if (q_out.empty()) {
        write_csv(out, prof);
      } else {
        write_output(q_out, [&](std::ostream& os) { write_csv(os, prof); });
        out << "cells p>=0.9: " << count_at_least(prof, 0.9) << " wrote " << q_out << '\n';
      }
      return 0;
    }

    if (simulate->parsed()) {
      const auto [train, id] = m_src.resolve(common);
      nm.t1 = t1_us * 1e-6;
      nm.t2 = t2_us * 1e-6;
      nm.pulse_duration = pulse_ns * 1e-9;
      nm.check();
      out << "# repro: simulate" << m_src.repro() << " --shots " << nm.shots << " --rng-seed " << m_rng << " --t1 "
          << fmt(t1_us) << " --t2 " << fmt(t2_us) << " --readout " << fmt(nm.readout_error) << " --pulse-ns "
          << fmt(pulse_ns) << " --eps-step " << fmt(m_step) << catalog_flag() << " --unit pi\n";
      const auto sim = noise::simulate_profile(train, GridSpec::eps_only(-1.0, 1.0, m_step), nm, m_rng, id);
      const CsvHeader header{{{"t1", fmt(nm.t1)},
                              {"t2", fmt(nm.t2)},
                              {"readout", fmt(nm.readout_error)},
                              {"shots", std::to_string(nm.shots)}}};
      const auto peak = [](const Profile& p) { return *std::max_element(p.values.begin(), p.values.end()); };
      const std::size_t centre = sim.measured.grid.eps_count() / 2;
      std::ostringstream summary;
      summary << "ideal_center=" << fmt(transition_probability(train))
              << " decohered_peak=" << fmt(peak(sim.decohered)) << " expected_peak=" << fmt(peak(sim.expected))
              << " measured_center=" << fmt(sim.measured.values[centre])
              << " measured_peak=" << fmt(peak(sim.measured)) << '\n';
      if (m_out.empty()) {
        write_csv(out, sim.measured, header);
        out << "# " << summary.str();
      } else {
        write_output(m_out, [&](std::ostream& os) { write_csv(os, sim.measured, header); });
        out << summary.str() << "wrote " << m_out << '\n';
      }
      return 0;
    }

    if (validate->parsed()) {
      // Parsing already re-validates every entry; report the per-entry details.
      const auto entries = open_catalog(common);
      out << "# repro: validate" << (v_id.empty() ? "" : " --id " + v_id) << catalog_flag() << '\n';
      bool any = false;
      for (const auto& e : entries) {
        if (!v_id.empty() && e.id != v_id) continue;
        any = true;
        const auto rv = catalog::revalidate(e);
        out << e.id << ": " << (rv.ok ? "ok" : "FAILED") << " (" << rv.detail << ")\n";
        if (!rv.ok) return 1;
      }
      if (!any) throw UsageError("no catalog entry with id '" + v_id + "'");
      return 0;
    }

    if (cat_list->parsed()) {
      for (const auto& e : open_catalog(common)) {
        out << e.id << "  N=" << e.train.size() << "  " << to_string(e.train.symmetry()) << "  "
            << (e.provenance == catalog::Provenance::PaperCaption ? "paper-caption" : "derived") << '\n';
      }
      return 0;
    }

    if (cat_show->parsed()) {
      const auto entries = open_catalog(common);
      const auto* e = catalog::find(entries, c_id);
      if (!e) throw UsageError("no catalog entry with id '" + c_id + "'");
      catalog::write_catalog(out, {*e});
      out << "center p=" << fmt(transition_probability(e->train)) << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const RevalidationError& e) {
    err << "validation failed: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "catalog error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ppt::cli
