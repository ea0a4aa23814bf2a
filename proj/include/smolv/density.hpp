#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <span>
#include <vector>

#include "smolv/grid.hpp"

namespace smolv {

/// Values at or above this are treated as round-off and clipped to zero.
inline constexpr double kNegativityTolerance = 1e-14;

/// The state {f_m}_{m=1..M}: M nonnegative density fields on one grid.
///
/// Levels are 1-based to match the mass they carry. Storage is contiguous,
/// level-major.
class DensitySet {
 public:
  DensitySet(const VelocityGrid& grid, int M);

  int levels() const { return M_; }
  const VelocityGrid& grid() const { return grid_; }
  std::size_t cells() const { return grid_.size(); }

  std::span<double> level(int m);
  std::span<const double> level(int m) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// sum_a f_m(v_a) h^d
  double mass(int m) const;
  /// sum_m m * mass(m)
  double weighted_mass() const;

  bool all_zero() const;

  /// Throws if any value is non-finite or below -kNegativityTolerance.
  void check_valid() const;
  /// Clips values in [-kNegativityTolerance, 0) to zero; throws on worse.
  /// Returns the total clipped amount (absolute).
  double clip_roundoff();

  DensitySet& operator+=(const DensitySet& other);
  DensitySet& operator*=(double s);
  friend DensitySet operator+(DensitySet a, const DensitySet& b) { return a += b; }
  friend DensitySet operator*(double s, DensitySet a) { return a *= s; }

 private:
  VelocityGrid grid_;
  int M_;
  std::vector<double> data_;
};

/// Raised when a density value falls below -kNegativityTolerance.
class PositivityViolation : public std::runtime_error {
 public:
  PositivityViolation(const std::string& what, int level, std::size_t cell, double value)
      : std::runtime_error(what), level_(level), cell_(cell), value_(value) {}
  int level() const { return level_; }
  std::size_t cell() const { return cell_; }
  double value() const { return value_; }

 private:
  int level_;
  std::size_t cell_;
  double value_;
};

}  // namespace smolv
