#pragma once

// Excitation-profile sweeps over the error axes and bandwidth metrics.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppt/su2.hpp"

namespace ppt {

// Uniform 1D (eps) or 2D (eps, delta) lattice. delta is in rad per unit duration.
struct GridSpec {
  double eps_lo = -1.0;
  double eps_hi = 1.0;
  double eps_step = 2e-3;
  std::optional<double> delta_lo;
  std::optional<double> delta_hi;
  std::optional<double> delta_step;

  static GridSpec eps_only(double lo, double hi, double step);
  static GridSpec eps_delta(double lo, double hi, double step, double dlo, double dhi, double dstep);

  bool is_2d() const { return delta_step.has_value(); }
  // Throws InvalidInput unless lo < hi, step > 0 and step divides the range within 1e-9.
  void check() const;
  std::size_t eps_count() const;
  std::size_t delta_count() const;  // 1 for a 1D grid
  double eps_at(std::size_t i) const;
  double delta_at(std::size_t j) const;  // 0 for a 1D grid
};

// values are stored delta-major: index = j * eps_count + i.
struct Profile {
  GridSpec grid;
  std::vector<double> values;
  std::string train_id;

  double at(std::size_t i, std::size_t j = 0) const { return values[j * grid.eps_count() + i]; }
};

Profile sweep_1d(const PulseTrain& train, const GridSpec& grid, std::string train_id = {});
Profile sweep_2d(const PulseTrain& train, const GridSpec& grid, std::string train_id = {});

enum class BandMode { Inner, Outer };

struct BandResult {
  double value = 0.0;
  bool attained = true;  // false when the level is never met (Inner) or the edge still exceeds it (Outer)
};

// Inner: half-width of the largest interval [-w, w] around eps = 0 on which
//        |p - target| <= level (the smaller of the two one-sided extents).
// Outer: smallest |eps| beyond which p <= level out to the grid edges.
// Crossings are located by linear interpolation between grid points.
// For a 2D profile the delta = 0 row is used (throws if absent).
BandResult band_at_level(const Profile& profile, double target, double level, BandMode mode);

// Number of lattice cells whose value is >= level.
std::size_t count_at_least(const Profile& profile, double level);

struct CsvHeader {
  std::vector<std::pair<std::string, std::string>> fields;  // extra "# key=value" pairs
};

// "# train=<id> unit=pi/T" header, optional extra header line, column line,
// then eps[,delta],p rows at 9 significant digits. delta is written in pi/T units.
void write_csv(std::ostream& os, const Profile& profile, const CsvHeader& extra = {});

// Fixed 9-significant-digit rendering shared by every text output.
std::string format_number(double v);

}  // namespace ppt
