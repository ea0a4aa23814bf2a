#include "smolv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smolv {

VelocityGrid::VelocityGrid(int d, int G, double V) : d_(d), G_(G), V_(V) {
  if (d < 1 || d > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (G < 2) throw ConfigError("grid.G must be >= 2");
  if (!(V > 0.0)) throw ConfigError("grid.V must be > 0");
  h_ = 2.0 * V / G;
  cell_volume_ = std::pow(h_, d);
  size_ = 1;
  for (int k = 0; k < d; ++k) {
    stride_[k] = size_;
    size_ *= static_cast<std::size_t>(G);
  }
  coords_.resize(size_ * d);
  speed_sq_.resize(size_);
  bracket_.resize(size_);
  for (std::size_t a = 0; a < size_; ++a) {
    const auto idx = multi_index(a);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double x = axis_center(idx[k]);
      coords_[a * d + k] = x;
      s += x * x;
    }
    speed_sq_[a] = s;
    bracket_[a] = std::sqrt(1.0 + s);
  }
}

std::array<int, 3> VelocityGrid::multi_index(std::size_t a) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < d_; ++k) {
    idx[k] = static_cast<int>(a % G_);
    a /= G_;
  }
  return idx;
}

std::size_t VelocityGrid::flat_index(const std::array<int, 3>& idx) const {
  std::size_t a = 0;
  for (int k = 0; k < d_; ++k) a += stride_[k] * static_cast<std::size_t>(idx[k]);
  return a;
}

VelocityGrid build_grid(const Params& params) {
  return VelocityGrid(params.d, params.G, params.V);
}

double weighted_norm(std::span<const double> field, WeightedNormSpec spec,
                     const VelocityGrid& grid) {
  if (field.size() != grid.size()) {
    throw std::invalid_argument("weighted_norm: field size does not match grid");
  }
  if (spec.k < 0) throw std::invalid_argument("weighted_norm: weight power must be >= 0");
  const double hd = grid.cell_volume();
  switch (spec.p) {
    case Lebesgue::L1: {
      double s = 0.0;
      for (std::size_t a = 0; a < field.size(); ++a) {
        s += std::abs(field[a]) * std::pow(grid.bracket(a), spec.k);
      }
      return s * hd;
    }
    case Lebesgue::L2: {
      double s = 0.0;
      for (std::size_t a = 0; a < field.size(); ++a) {
        const double w = std::abs(field[a]) * std::pow(grid.bracket(a), spec.k);
        s += w * w;
      }
      return std::sqrt(s * hd);
    }
    case Lebesgue::Linf: {
      double s = 0.0;
      for (std::size_t a = 0; a < field.size(); ++a) {
        s = std::max(s, std::abs(field[a]) * std::pow(grid.bracket(a), spec.k));
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace smolv
