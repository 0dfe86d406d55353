#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace lightray {

// Spacetime dimension 1+n is capped so small vectors and matrices live on the
// stack. n >= 2 is required everywhere; n <= 3 is what the Fourier and
// foliation experiments are built for.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Axis-aligned box in chart coordinates.
struct Box {
  Vec lo;
  Vec hi;

  [[nodiscard]] bool contains(const Vec& z) const {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (z[i] < lo[i] || z[i] > hi[i]) return false;
    }
    return true;
  }
  [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
};

}  // namespace lightray
