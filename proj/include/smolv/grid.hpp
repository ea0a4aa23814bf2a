#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "smolv/params.hpp"

namespace smolv {

/// Uniform cell-centered Cartesian grid on (-V, V)^d.
///
/// Cells are flattened with axis 0 fastest: a = i_0 + G*i_1 + G^2*i_2.
/// Centers sit at -V + (i + 1/2) h, so the lattice is symmetric about the
/// origin.
class VelocityGrid {
 public:
  VelocityGrid(int d, int G, double V);

  int dim() const { return d_; }
  int cells_per_axis() const { return G_; }
  double half_width() const { return V_; }
  double spacing() const { return h_; }
  /// h^d
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  /// Coordinate of the i-th center along any axis, -V + (i + 1/2) h, written
  /// as an odd integer times h/2 so that centers are exactly antisymmetric.
  double axis_center(int i) const { return (2 * i + 1 - G_) * (0.5 * h_); }
  double center(std::size_t a, int axis) const { return coords_[a * d_ + axis]; }
  std::array<int, 3> multi_index(std::size_t a) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;

  /// |v_a|^2
  double speed_sq(std::size_t a) const { return speed_sq_[a]; }
  /// <v_a> = sqrt(1 + |v_a|^2)
  double bracket(std::size_t a) const { return bracket_[a]; }

  /// Stride between neighbours along `axis` in the flattened layout.
  std::size_t stride(int axis) const { return stride_[axis]; }

  bool same_as(const VelocityGrid& other) const {
    return d_ == other.d_ && G_ == other.G_ && V_ == other.V_;
  }

 private:
  int d_;
  int G_;
  double V_;
  double h_;
  double cell_volume_;
  std::size_t size_;
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::vector<double> coords_;
  std::vector<double> speed_sq_;
  std::vector<double> bracket_;
};

VelocityGrid build_grid(const Params& params);

enum class Lebesgue { L1, L2, Linf };

/// Exponent p and weight power k of L^p_k, the space of f with f<v>^k in L^p.
struct WeightedNormSpec {
  Lebesgue p = Lebesgue::L1;
  int k = 0;
};

/// Midpoint-rule weighted norm of one grid field.
double weighted_norm(std::span<const double> field, WeightedNormSpec spec,
                     const VelocityGrid& grid);

}  // namespace smolv
