#pragma once

// Persistent catalog of pulse trains.
//
// Text format, one record per entry:
//
//   format: ppt-catalog/1
//   ---
//   id: BB-X3-deriv
//   provenance: paper-caption
//   unit: pi/T
//   symmetry: antisymmetric
//   rabi: 0.6397
//   duration: 1
//   detunings: 0.72 0 -0.72
//   problem: deriv
//   target: 1
//   n_free: 1
//   tolerance: 0.05
//   notes: ...
//
// Rabi frequencies and detunings are stored in units of pi per unit duration.
// Numbers are rendered with 9 significant digits, so save(load(f)) == f.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ppt/cost_synthesis.hpp"
#include "ppt/deriv_solver.hpp"
#include "ppt/su2.hpp"

namespace ppt::catalog {

inline constexpr const char* kFormatTag = "ppt-catalog/1";
inline constexpr const char* kPathEnv = "PPT_CATALOG";
// Centre-slope bound for narrowband caption entries: four-digit rounding of the
// parameters alone moves dp/deps(0) by several 1e-4.
inline constexpr double kCaptionSlopeTolerance = 1e-3;

enum class Provenance { PaperCaption, Derived };
enum class Unit { PiPerT };

using Problem = std::variant<synth::SynthesisProblem, deriv::DerivProblem>;

struct CatalogEntry {
  std::string id;
  PulseTrain train;
  Unit unit = Unit::PiPerT;
  Problem problem;
  Provenance provenance = Provenance::Derived;
  // Multiplies alpha in the load-time check of synthesis entries; caption
  // parameters are rounded to four digits and need headroom.
  double allowance = 1.0;
  std::string notes;
};

struct Revalidation {
  bool ok = false;
  std::string detail;
};

// Same predicate as at creation: residual bound for derivative entries,
// class validation (alpha * allowance) for synthesis entries.
Revalidation revalidate(const CatalogEntry& e);

// Throws ParseError (with line number) on malformed input, unknown fields,
// schema mismatch, invalid trains or entries that fail re-validation.
std::vector<CatalogEntry> parse_catalog(std::istream& is);
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path);

void write_catalog(std::ostream& os, const std::vector<CatalogEntry>& entries);
void save_catalog(const std::vector<CatalogEntry>& entries, const std::filesystem::path& path);

// $PPT_CATALOG when set, otherwise the shipped fixture file.
std::filesystem::path default_catalog_path();

const CatalogEntry* find(const std::vector<CatalogEntry>& entries, const std::string& id);

// Train with parameters rounded exactly as save_catalog writes them.
PulseTrain as_stored(const PulseTrain& t);

// Entries built from solver output use the stored (rounded) parameters; the
// derivative residual bound is widened by decades until the rounded train meets it.
CatalogEntry from_deriv(std::string id, const deriv::DerivSolution& s, const deriv::DerivProblem& prob,
                        std::string notes = {});
CatalogEntry from_synthesis(std::string id, const synth::SynthesisResult& r, const synth::SynthesisProblem& prob,
                            std::string notes = {});

}  // namespace ppt::catalog
