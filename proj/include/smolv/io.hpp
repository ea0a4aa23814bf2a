#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smolv/density.hpp"
#include "smolv/diagnostics.hpp"
#include "smolv/integrator.hpp"

namespace smolv {

/// Raised for any file system failure; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g": enough digits for a lossless double round trip.
std::string format_double(double x);

/// t,mass_1..mass_M,T,expelled,leakage,momentum_1..momentum_d,moment2,l2_energy,h1_seminorm,dist_ref
std::vector<std::string> diagnostics_columns(int M, int d);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows, int M, int d);

/// Reads back the columns written by write_diagnostics_csv. M and d are
/// inferred from the header, which must match the schema exactly.
std::vector<DiagnosticsRow> read_diagnostics_csv(const std::filesystem::path& path);

/// snapshot_<source>_t<t>_m<m>.csv, t printed with "%.9g".
std::string snapshot_filename(const std::string& source, double t, int m);

/// Writes one file per level with columns v_1..v_d,f, cells in flat order.
void write_snapshot(const std::filesystem::path& dir, const std::string& source,
                    const Snapshot& snapshot);

/// Reads the M level files of one snapshot onto `grid`; cell centers in the
/// files must match the grid.
DensitySet read_snapshot(const std::filesystem::path& dir, const std::string& source, double t,
                         const VelocityGrid& grid, int M);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace smolv
