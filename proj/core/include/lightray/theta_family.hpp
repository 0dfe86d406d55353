#pragma once

#include <cmath>

#include "lightray/linalg.hpp"

namespace lightray {

// The one-parameter family of celestial directions
//   theta(q) = cos(q) e_n + sin(q) e_{n-1},
// a unit curve through theta(0) = e_n that turns towards e_{n-1}.
struct ThetaFamily {
  int n = 3;

  [[nodiscard]] Vec operator()(double q) const {
    Vec th = Vec::Zero(n);
    th[n - 1] = std::cos(q);
    th[n - 2] = std::sin(q);
    return th;
  }
  [[nodiscard]] Vec derivative(double q) const {
    Vec d = Vec::Zero(n);
    d[n - 1] = -std::sin(q);
    d[n - 2] = std::cos(q);
    return d;
  }
};

}  // namespace lightray
