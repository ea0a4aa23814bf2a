#include "smolv/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace smolv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& s, const std::filesystem::path& path, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> diagnostics_columns(int M, int d) {
  std::vector<std::string> cols{"t"};
  for (int m = 1; m <= M; ++m) cols.push_back("mass_" + std::to_string(m));
  cols.insert(cols.end(), {"T", "expelled", "leakage"});
  for (int k = 1; k <= d; ++k) cols.push_back("momentum_" + std::to_string(k));
  cols.insert(cols.end(), {"moment2", "l2_energy", "h1_seminorm", "dist_ref"});
  return cols;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows, int M, int d) {
  std::ofstream out = open_out(path);
  const auto cols = diagnostics_columns(M, d);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const DiagnosticsRow& r : rows) {
    if (static_cast<int>(r.mass.size()) != M || static_cast<int>(r.momentum.size()) != d) {
      throw std::invalid_argument("write_diagnostics_csv: row shape does not match M, d");
    }
    out << format_double(r.t);
    for (double x : r.mass) out << ',' << format_double(x);
    out << ',' << format_double(r.T) << ',' << format_double(r.expelled) << ','
        << format_double(r.leakage);
    for (double x : r.momentum) out << ',' << format_double(x);
    out << ',' << format_double(r.moment2) << ',' << format_double(r.l2_energy) << ','
        << format_double(r.h1_seminorm) << ',' << format_double(r.dist_ref) << '\n';
  }
  finish(out, path);
}

std::vector<DiagnosticsRow> read_diagnostics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split_csv(line);
  int M = 0, d = 0;
  for (const auto& h : header) {
    if (h.rfind("mass_", 0) == 0) ++M;
    if (h.rfind("momentum_", 0) == 0) ++d;
  }
  if (header != diagnostics_columns(M, d)) {
    throw IoError(path.string() + ": header does not match the diagnostics schema");
  }
  std::vector<DiagnosticsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(header.size()) + " columns");
    }
    std::size_t c = 0;
    auto next = [&] { return parse_cell(cells[c++], path, lineno); };
    DiagnosticsRow r;
    r.t = next();
    for (int m = 0; m < M; ++m) r.mass.push_back(next());
    r.T = next();
    r.expelled = next();
    r.leakage = next();
    for (int k = 0; k < d; ++k) r.momentum.push_back(next());
    r.moment2 = next();
    r.l2_energy = next();
    r.h1_seminorm = next();
    r.dist_ref = next();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string snapshot_filename(const std::string& source, double t, int m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return "snapshot_" + source + "_t" + buf + "_m" + std::to_string(m) + ".csv";
}

void write_snapshot(const std::filesystem::path& dir, const std::string& source,
                    const Snapshot& snapshot) {
  const DensitySet& f = snapshot.f;
  const VelocityGrid& grid = f.grid();
  const int d = grid.dim();
  for (int m = 1; m <= f.levels(); ++m) {
    const auto path = dir / snapshot_filename(source, snapshot.t, m);
    std::ofstream out = open_out(path);
    for (int k = 1; k <= d; ++k) out << "v_" << k << ',';
    out << "f\n";
    const auto level = f.level(m);
    for (std::size_t a = 0; a < grid.size(); ++a) {
      for (int ax = 0; ax < d; ++ax) out << format_double(grid.center(a, ax)) << ',';
      out << format_double(level[a]) << '\n';
    }
    finish(out, path);
  }
}

DensitySet read_snapshot(const std::filesystem::path& dir, const std::string& source, double t,
                         const VelocityGrid& grid, int M) {
  DensitySet f(grid, M);
  const int d = grid.dim();
  for (int m = 1; m <= M; ++m) {
    const auto path = dir / snapshot_filename(source, t, m);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    std::getline(in, line);
    std::string expect;
    for (int k = 1; k <= d; ++k) expect += "v_" + std::to_string(k) + ",";
    expect += "f";
    if (line != expect) throw IoError(path.string() + ": header does not match the snapshot schema");
    auto level = f.level(m);
    std::size_t a = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (static_cast<int>(cells.size()) != d + 1 || a >= grid.size()) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": unexpected row");
      }
      for (int ax = 0; ax < d; ++ax) {
        if (parse_cell(cells[ax], path, lineno) != grid.center(a, ax)) {
          throw IoError(path.string() + ":" + std::to_string(lineno) +
                        ": cell center does not match the grid");
        }
      }
      level[a++] = parse_cell(cells[d], path, lineno);
    }
    if (a != grid.size()) throw IoError(path.string() + ": expected " + std::to_string(grid.size()) + " rows");
  }
  return f;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace smolv
