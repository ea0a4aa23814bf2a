#include "smolv/density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smolv {

DensitySet::DensitySet(const VelocityGrid& grid, int M)
    : grid_(grid), M_(M), data_(static_cast<std::size_t>(M) * grid.size(), 0.0) {
  if (M < 1) throw ConfigError("DensitySet needs at least one level");
}

std::span<double> DensitySet::level(int m) {
  if (m < 1 || m > M_) throw std::out_of_range("DensitySet::level out of range");
  return std::span<double>(data_).subspan((m - 1) * cells(), cells());
}

std::span<const double> DensitySet::level(int m) const {
  if (m < 1 || m > M_) throw std::out_of_range("DensitySet::level out of range");
  return std::span<const double>(data_).subspan((m - 1) * cells(), cells());
}

double DensitySet::mass(int m) const {
  double s = 0.0;
  for (double x : level(m)) s += x;
  return s * grid_.cell_volume();
}

double DensitySet::weighted_mass() const {
  double s = 0.0;
  for (int m = 1; m <= M_; ++m) s += m * mass(m);
  return s;
}

bool DensitySet::all_zero() const {
  for (double x : data_) {
    if (x != 0.0) return false;
  }
  return true;
}

void DensitySet::check_valid() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double x = data_[i];
    if (!std::isfinite(x) || x < -kNegativityTolerance) {
      const int m = static_cast<int>(i / cells()) + 1;
      const std::size_t a = i % cells();
      std::ostringstream os;
      os << "invalid density value " << x << " at level " << m << ", cell " << a;
      throw PositivityViolation(os.str(), m, a, x);
    }
  }
}

double DensitySet::clip_roundoff() {
  check_valid();
  double clipped = 0.0;
  for (double& x : data_) {
    if (x < 0.0) {
      clipped -= x;
      x = 0.0;
    }
  }
  return clipped;
}

DensitySet& DensitySet::operator+=(const DensitySet& other) {
  if (!grid_.same_as(other.grid_) || M_ != other.M_) {
    throw std::invalid_argument("DensitySet addition: shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DensitySet& DensitySet::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

}  // namespace smolv
