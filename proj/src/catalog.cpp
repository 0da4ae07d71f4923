#include "ppt/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "ppt/errors.hpp"
#include "ppt/profile.hpp"

namespace ppt::catalog {

namespace {

constexpr double kPi = std::numbers::pi;

const std::set<std::string> kCommonKeys{"id", "provenance", "unit", "symmetry", "rabi", "duration",
                                        "detunings", "problem", "notes"};
const std::set<std::string> kDerivKeys{"target", "n_free", "tolerance"};
const std::set<std::string> kSynthKeys{"class", "target", "length", "eps0", "alpha", "delta0", "stopband", "allowance"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, std::size_t line, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ParseError(line, "field '" + key + "': expected a finite number, got '" + t + "'");
  }
  return v;
}

int parse_int(const std::string& text, std::size_t line, const std::string& key) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(line, "field '" + key + "': expected an integer, got '" + t + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, std::size_t line, const std::string& key) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, line, key));
  if (out.empty()) throw ParseError(line, "field '" + key + "' is empty");
  return out;
}

const char* to_string(Provenance p) { return p == Provenance::PaperCaption ? "paper-caption" : "derived"; }

struct Record {
  std::size_t first_line = 0;
  std::map<std::string, std::pair<std::string, std::size_t>> fields;  // key -> (value, line)

  const std::pair<std::string, std::size_t>& get(const std::string& key) const {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(first_line, "missing required field '" + key + "'");
    return it->second;
  }
  bool has(const std::string& key) const { return fields.count(key) > 0; }
  double number(const std::string& key) const {
    const auto& [v, l] = get(key);
    return parse_double(v, l, key);
  }
};

CatalogEntry build_entry(const Record& rec) {
  const auto& [problem_kind, problem_line] = rec.get("problem");
  const std::set<std::string>* specific = nullptr;
  if (problem_kind == "deriv") {
    specific = &kDerivKeys;
  } else if (problem_kind == "synthesis") {
    specific = &kSynthKeys;
  } else {
    throw ParseError(problem_line, "field 'problem': expected 'deriv' or 'synthesis'");
  }
  for (const auto& [key, val] : rec.fields) {
    if (!kCommonKeys.count(key) && !specific->count(key)) {
      throw ParseError(val.second, std::string("unknown field '") + key + "' for schema " + kFormatTag);
    }
  }

  const auto& [unit, unit_line] = rec.get("unit");
  if (unit != "pi/T") throw ParseError(unit_line, "field 'unit': only 'pi/T' is supported");

  const auto& [prov, prov_line] = rec.get("provenance");
  Provenance provenance;
  if (prov == "paper-caption") {
    provenance = Provenance::PaperCaption;
  } else if (prov == "derived") {
    provenance = Provenance::Derived;
  } else {
    throw ParseError(prov_line, "field 'provenance': expected 'paper-caption' or 'derived'");
  }

  const auto& [sym_text, sym_line] = rec.get("symmetry");
  Symmetry symmetry;
  try {
    symmetry = symmetry_from_string(sym_text);
  } catch (const InvalidInput& e) {
    throw ParseError(sym_line, e.what());
  }

  const auto& [det_text, det_line] = rec.get("detunings");
  std::vector<double> detunings = parse_list(det_text, det_line, "detunings");
  for (double& d : detunings) d *= kPi;
  const double rabi = rec.number("rabi") * kPi;
  const double duration = rec.number("duration");

  std::optional<PulseTrain> train;
  try {
    train.emplace(PulseTrain::from_detunings(rabi, detunings, symmetry, duration));
  } catch (const InvalidInput& e) {
    throw ParseError(rec.get("rabi").second, std::string("invalid train: ") + e.what());
  }
  if (train_propagator(*train).unitarity_defect() > 1e-12) {
    throw ParseError(rec.first_line, "train propagator is not unitary");
  }

  Problem problem;
  double allowance = 1.0;
  try {
    if (problem_kind == "deriv") {
      deriv::DerivProblem dp;
      dp.target_p = rec.number("target");
      const auto& [nf, nf_line] = rec.get("n_free");
      dp.n_free = parse_int(nf, nf_line, "n_free");
      dp.tolerance = rec.number("tolerance");
      deriv::check_problem(dp);
      problem = dp;
    } else {
      const auto& [cls, cls_line] = rec.get("class");
      const auto& [len, len_line] = rec.get("length");
      synth::SynthesisProblem sp =
          synth::SynthesisProblem::make(synth::profile_class_from_string(cls), rec.number("target"),
                                        parse_int(len, len_line, "length"), rec.number("eps0"), rec.number("alpha"));
      sp.symmetry = symmetry;
      if (rec.has("delta0")) sp.delta0 = rec.number("delta0") * kPi;
      if (rec.has("stopband")) sp.stopband_start = rec.number("stopband");
      if (rec.has("allowance")) allowance = rec.number("allowance");
      sp.check();
      problem = sp;
    }
  } catch (const InvalidInput& e) {
    throw ParseError(problem_line, std::string("invalid problem: ") + e.what());
  }

  CatalogEntry entry{rec.get("id").first, std::move(*train), Unit::PiPerT, problem, provenance, allowance,
                     rec.has("notes") ? rec.get("notes").first : std::string{}};
  if (entry.id.empty()) throw ParseError(rec.first_line, "field 'id' is empty");
  if (entry.provenance == Provenance::PaperCaption && entry.notes.find("figure") == std::string::npos) {
    throw ParseError(rec.first_line, "paper-caption entry '" + entry.id + "' must cite its figure in notes");
  }
  const Revalidation rv = revalidate(entry);
  if (!rv.ok) throw RevalidationError(rec.first_line, "entry '" + entry.id + "' fails re-validation: " + rv.detail);
  return entry;
}

std::string join(const std::vector<double>& v, double scale) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ' ';
    s += format_number(v[k] / scale);
  }
  return s;
}

}  // namespace

Revalidation revalidate(const CatalogEntry& e) {
  try {
    if (const auto* dp = std::get_if<deriv::DerivProblem>(&e.problem)) {
      const auto n = static_cast<std::size_t>(dp->n_free);
      if (e.train.size() != 2 * n + 1 || e.train.symmetry() != Symmetry::Antisymmetric) {
        return {false, "derivative entries need an antisymmetric train of length 2 n_free + 1"};
      }
      const std::vector<double> d = e.train.detunings();
      const std::vector<double> r = deriv::build_residuals(e.train.rabi(), std::span(d.data(), n), *dp);
      double worst = 0.0;
      for (double v : r) worst = std::max(worst, std::abs(v));
      if (worst > dp->tolerance) {
        return {false, "max residual " + format_number(worst) + " exceeds tolerance " + format_number(dp->tolerance)};
      }
      return {true, "max residual " + format_number(worst)};
    }
    synth::SynthesisProblem sp = std::get<synth::SynthesisProblem>(e.problem);
    sp.alpha *= e.allowance;
    synth::ValidateOptions vo;
    if (e.provenance == Provenance::PaperCaption) vo.center_slope_tolerance = kCaptionSlopeTolerance;
    const synth::SynthesisResult r = synth::validate(e.train, sp, vo);
    std::string detail = "bb_band=" + format_number(r.measured_bb_band) + " nb_band=" +
                         format_number(r.measured_nb_band) + " center=" + format_number(r.center_value);
    if (sp.profile_class == synth::ProfileClass::Narrowband && sp.target_p != 1.0) {
      detail += " slope=" + format_number(r.center_slope);
    }
    return {r.validated, detail};
  } catch (const std::exception& ex) {
    return {false, ex.what()};
  }
}

std::vector<CatalogEntry> parse_catalog(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool saw_format = false;
  std::vector<Record> records;
  std::optional<Record> current;

  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "---") {
      if (!saw_format) throw ParseError(lineno, std::string("missing 'format: ") + kFormatTag + "' header");
      if (current) records.push_back(std::move(*current));
      current = Record{lineno + 1, {}};
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
    const std::string key = trim(t.substr(0, colon));
    const std::string value = trim(t.substr(colon + 1));
    if (!current) {
      if (key != "format") throw ParseError(lineno, "unexpected field '" + key + "' before first record");
      if (value != kFormatTag) {
        throw ParseError(lineno, "unsupported schema '" + value + "' (expected " + kFormatTag + ")");
      }
      saw_format = true;
      continue;
    }
    if (!current->fields.emplace(key, std::make_pair(value, lineno)).second) {
      throw ParseError(lineno, "duplicate field '" + key + "'");
    }
  }
  if (!saw_format) throw ParseError(lineno, std::string("missing 'format: ") + kFormatTag + "' header");
  if (current) records.push_back(std::move(*current));

  std::vector<CatalogEntry> entries;
  std::set<std::string> ids;
  for (const auto& rec : records) {
    CatalogEntry e = build_entry(rec);
    if (!ids.insert(e.id).second) throw ParseError(rec.first_line, "duplicate id '" + e.id + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open catalog '" + path.string() + "'");
  return parse_catalog(is);
}

void write_catalog(std::ostream& os, const std::vector<CatalogEntry>& entries) {
  os << "format: " << kFormatTag << '\n';
  for (const auto& e : entries) {
    os << "---\n";
    os << "id: " << e.id << '\n';
    os << "provenance: " << to_string(e.provenance) << '\n';
    os << "unit: pi/T\n";
    os << "symmetry: " << to_string(e.train.symmetry()) << '\n';
    os << "rabi: " << format_number(e.train.rabi() / kPi) << '\n';
    os << "duration: " << format_number(e.train.duration()) << '\n';
    os << "detunings: " << join(e.train.detunings(), kPi) << '\n';
    if (const auto* dp = std::get_if<deriv::DerivProblem>(&e.problem)) {
      os << "problem: deriv\n";
      os << "target: " << format_number(dp->target_p) << '\n';
      os << "n_free: " << dp->n_free << '\n';
      os << "tolerance: " << format_number(dp->tolerance) << '\n';
    } else {
      const auto& sp = std::get<synth::SynthesisProblem>(e.problem);
      os << "problem: synthesis\n";
      os << "class: " << synth::to_string(sp.profile_class) << '\n';
      os << "target: " << format_number(sp.target_p) << '\n';
      os << "length: " << sp.length << '\n';
      os << "eps0: " << format_number(sp.eps0) << '\n';
      os << "alpha: " << format_number(sp.alpha) << '\n';
      if (sp.profile_class == synth::ProfileClass::DoubleComp2D) {
        os << "delta0: " << format_number(sp.delta0 / kPi) << '\n';
      }
      if (sp.profile_class == synth::ProfileClass::Passband) {
        os << "stopband: " << format_number(sp.stopband_start) << '\n';
      }
      os << "allowance: " << format_number(e.allowance) << '\n';
    }
    if (!e.notes.empty()) os << "notes: " << e.notes << '\n';
  }
}

void save_catalog(const std::vector<CatalogEntry>& entries, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write catalog '" + path.string() + "'");
  write_catalog(os, entries);
  if (!os) throw InvalidInput("failed writing catalog '" + path.string() + "'");
}

std::filesystem::path default_catalog_path() {
  if (const char* env = std::getenv(kPathEnv); env && *env) return env;
  return PPT_DEFAULT_FIXTURES;
}

const CatalogEntry* find(const std::vector<CatalogEntry>& entries, const std::string& id) {
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.id == id; });
  return it == entries.end() ? nullptr : &*it;
}

CatalogEntry from_deriv(std::string id, const deriv::DerivSolution& s, const deriv::DerivProblem& prob,
                        std::string notes) {
  const PulseTrain stored = as_stored(s.train());
  deriv::DerivProblem p = prob;
  // The residual bound must hold for the parameters as written to disk.
  const std::vector<double> d = stored.detunings();
  const auto n = static_cast<std::size_t>(prob.n_free);
  double worst = 0.0;
  for (double v : deriv::build_residuals(stored.rabi(), std::span(d.data(), n), prob)) {
    worst = std::max(worst, std::abs(v));
  }
  while (p.tolerance < worst) p.tolerance *= 10.0;
  CatalogEntry e{std::move(id), stored, Unit::PiPerT, p, Provenance::Derived, 1.0, std::move(notes)};
  return e;
}

CatalogEntry from_synthesis(std::string id, const synth::SynthesisResult& r, const synth::SynthesisProblem& prob,
                            std::string notes) {
  CatalogEntry e{std::move(id), as_stored(r.train), Unit::PiPerT, prob, Provenance::Derived, 1.0, std::move(notes)};
  const Revalidation rv = revalidate(e);
  if (!rv.ok) throw InvalidInput("entry '" + e.id + "' does not validate at stored precision: " + rv.detail);
  return e;
}

PulseTrain as_stored(const PulseTrain& t) {
  auto round = [](double v) { return std::strtod(format_number(v / kPi).c_str(), nullptr) * kPi; };
  std::vector<double> d = t.detunings();
  for (double& v : d) v = round(v);
  return PulseTrain::from_detunings(round(t.rabi()), d, t.symmetry(),
                                    std::strtod(format_number(t.duration()).c_str(), nullptr));
}

}  // namespace ppt::catalog
