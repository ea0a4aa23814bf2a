#include "smolv/ou_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace smolv {

namespace {

constexpr double kKernelWidth = 8.0;  // in units of sigma

struct AxisKernel {
  int first = 0;               // first in-box target index
  std::vector<double> weight;  // weights for targets first, first+1, ...
  double leak = 0.0;           // weight that fell outside [0, G)
};

std::vector<AxisKernel> build_axis_kernels(const VelocityGrid& grid, double shrink,
                                           double sigma) {
  const int G = grid.cells_per_axis();
  const double h = grid.spacing();
  std::vector<AxisKernel> kernels(G);
  for (int i = 0; i < G; ++i) {
    AxisKernel& K = kernels[i];
    const double mean = shrink * grid.axis_center(i);
    // Index-space position of the mean: x_j = (2j + 1 - G) h/2.
    const double pos = mean / h + 0.5 * (G - 1);
    bool gaussian = sigma > 0.0;
    if (gaussian) {
      const double reach = kKernelWidth * sigma / h;
      const long lo = static_cast<long>(std::ceil(pos - reach));
      const long hi = static_cast<long>(std::floor(pos + reach));
      if (hi < lo) {
        gaussian = false;
      } else {
        double total = 0.0;
        double outside = 0.0;
        std::vector<double> inside;
        long first = -1;
        for (long j = lo; j <= hi; ++j) {
          const double x = (2.0 * j + 1.0 - G) * (0.5 * h);
          const double z = (x - mean) / sigma;
          const double w = std::exp(-0.5 * z * z);
          total += w;
          if (j < 0 || j >= G) {
            outside += w;
          } else {
            if (first < 0) first = j;
            inside.push_back(w);
          }
        }
        if (!(total > 0.0)) {
          gaussian = false;
        } else {
          for (double& w : inside) w /= total;
          K.first = static_cast<int>(std::max<long>(first, 0));
          K.weight = std::move(inside);
          K.leak = outside / total;
        }
      }
    }
    if (!gaussian) {
      // Degenerate blur: cloud-in-cell placement of the contracted center,
      // which stays inside [x_0, x_{G-1}] because shrink <= 1.
      const double fl = std::floor(pos);
      const int j = std::clamp(static_cast<int>(fl), 0, G - 1);
      const double w_hi = pos - j;
      if (w_hi > 0.0 && j + 1 < G) {
        K.first = j;
        K.weight = {1.0 - w_hi, w_hi};
      } else {
        K.first = j;
        K.weight = {1.0};
      }
      K.leak = 0.0;
    }
  }
  return kernels;
}

}  // namespace

double ou_variance(const OUStepSpec& spec) {
  return spec.kappa * spec.c * -std::expm1(-2.0 * spec.c * spec.tau);
}

double ou_min_resolved_tau(double c, double kappa, double h) {
  const double x = h * h / (4.0 * kappa * c);
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-x) / (2.0 * c);
}

OUStepResult ou_step(std::span<const double> field, const OUStepSpec& spec,
                     const VelocityGrid& grid, bool waive_resolution) {
  if (field.size() != grid.size()) {
    throw std::invalid_argument("ou_step: field size does not match grid");
  }
  if (!(spec.tau >= 0.0) || !(spec.c > 0.0) || !(spec.kappa > 0.0)) {
    throw std::invalid_argument("ou_step: need tau >= 0, c > 0, kappa > 0");
  }
  const double h = grid.spacing();
  const double var = ou_variance(spec);
  const double sigma = std::sqrt(var);
  if (!waive_resolution && sigma < 0.5 * h * (1.0 - 1e-12)) {
    const double min_tau = ou_min_resolved_tau(spec.c, spec.kappa, h);
    const long factor = std::isfinite(min_tau) && spec.tau > 0.0
                            ? static_cast<long>(std::ceil(min_tau / spec.tau))
                            : std::numeric_limits<long>::max();
    std::ostringstream os;
    os << "ou_step refused: sigma=" << sigma << " < h/2=" << 0.5 * h
       << "; the OU interval must be at least " << min_tau << " (x" << factor << ")";
    throw StepRefused(os.str(), min_tau, factor);
  }

  const double shrink = std::exp(-spec.c * spec.tau);
  const auto kernels = build_axis_kernels(grid, shrink, sigma);
  const int d = grid.dim();
  const double hd = grid.cell_volume();

  OUStepResult out;
  std::vector<double> src(field.begin(), field.end());
  std::vector<double> dst(src.size());
  for (int ax = 0; ax < d; ++ax) {
    std::fill(dst.begin(), dst.end(), 0.0);
    const std::size_t stride = grid.stride(ax);
    const std::size_t G = static_cast<std::size_t>(grid.cells_per_axis());
    for (std::size_t a = 0; a < src.size(); ++a) {
      const double value = src[a];
      if (value == 0.0) continue;
      const std::size_t i = (a / stride) % G;
      const std::size_t base = a - i * stride;
      const AxisKernel& K = kernels[i];
      std::size_t cell = base + static_cast<std::size_t>(K.first) * stride;
      for (double w : K.weight) {
        dst[cell] += value * w;
        cell += stride;
      }
      out.leaked_mass += value * K.leak * hd;
    }
    std::swap(src, dst);
  }
  // Jacobian of the contraction is absorbed by the mass-normalized kernels.
  out.field = std::move(src);
  return out;
}

}  // namespace smolv
