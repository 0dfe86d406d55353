#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lightray/fields.hpp"
#include "lightray/geodesic.hpp"
#include "lightray/geometry.hpp"

namespace lightray {

// Quadrature nodes on S^{n-1}.
struct DirectionGrid {
  enum class Kind { Uniform, Fibonacci, Explicit };

  Kind kind = Kind::Explicit;
  std::vector<Vec> directions;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return directions.size(); }
  [[nodiscard]] int spatial_dim() const {
    return directions.empty() ? 0 : static_cast<int>(directions.front().size());
  }
  [[nodiscard]] double total_weight() const;

  // n = 2: angles offset + 2 pi k / count, weights 2 pi / count.
  static DirectionGrid circle(std::size_t count, double offset = 0.0);
  // n = 3: Fibonacci lattice, equal weights 4 pi / count.
  static DirectionGrid fibonacci(std::size_t count);
  // Either circle or fibonacci depending on n.
  static DirectionGrid standard(int n, std::size_t count);
  // Unit-normalised copies of the given directions with the given weights
  // (default 1 each).
  static DirectionGrid list(std::vector<Vec> directions, std::vector<double> weights = {});
};

// Something to integrate along rays: a pointwise evaluator and a closed box
// outside of which it vanishes.
struct Integrand {
  std::function<double(const Vec&)> f;
  Box support;

  static Integrand of(const ScalarField& field);
  static Integrand of(const Phantom& phantom);
};

// Samples of L_kappa f on (x, theta) grids, theta-major:
// values[itheta * x_grid.size() + ix].
struct Sinogram {
  GridSpec x_grid;
  DirectionGrid directions;
  std::vector<double> values;
  double step = 1e-3;
  std::string metric_id;
  std::string weight_id;
  // True when the x-grid contains the shadow {x - t theta : (t, x) in supp}
  // for every direction, so that values off the grid are known to vanish.
  bool covers_shadow = false;

  [[nodiscard]] std::size_t num_x() const { return x_grid.size(); }
  [[nodiscard]] std::size_t num_theta() const { return directions.size(); }
  [[nodiscard]] double at(std::size_t itheta, std::size_t ix) const {
    return values[itheta * num_x() + ix];
  }
  [[nodiscard]] std::span<const double> row(std::size_t itheta) const {
    return {values.data() + itheta * num_x(), num_x()};
  }
  [[nodiscard]] Vec x_point(std::size_t ix) const;
  // Multilinear interpolation of row itheta at x; zero off the grid.
  [[nodiscard]] double interpolate(std::size_t itheta, const Vec& x) const;
};

struct SinogramSpec {
  GridSpec x_grid;
  DirectionGrid directions;
  double step = 1e-3;
};

// Composite Simpson on the uniform samples s_k = k h covering [a, b]; the
// integrand is assumed to vanish outside [a, b]. The lattice is extended by
// one node when needed to make the interval count even.
double simpson_on_lattice(const std::function<double(double)>& g, double a, double b, double h);

// L_kappa f along one null geodesic, Simpson over its exit window from the
// support box. Minkowski lines are clipped analytically; other metrics are
// traced over [geo.s_min, geo.s_max] and a trapped path is an error.
double forward(const Metric& metric, const Integrand& f, const Weight& kappa,
               const LightGeodesic& geo);
double forward(const Metric& metric, const ScalarField& field, const Weight& kappa,
               const LightGeodesic& geo);
double forward(const Metric& metric, const Phantom& phantom, const Weight& kappa,
               const LightGeodesic& geo);

// forward over the product grid, rows (fixed theta) in parallel. The
// geodesic parameter window is chosen large enough to cross the whole
// support box.
Sinogram sinogram(const Metric& metric, const Integrand& f, const Weight& kappa,
                  const SinogramSpec& spec);

// Whether the x-grid contains the shadow of the box for every direction.
bool covers_shadow(const GridSpec& x_grid, const DirectionGrid& directions, const Box& support);

// Minkowski adjoint, L'g(t, x) = sum_theta w_theta g(x - t theta, theta),
// with g interpolated multilinearly in x. Every (t, x) must see x - t theta
// inside the x-grid for all theta unless sino.covers_shadow is set.
ScalarField backproject(const Sinogram& sino, const GridSpec& out_grid);

// Adjoint for a general metric: L'g(z) = sum_theta w_theta g(x#, theta) J,
// where (s#, x#) inverts the shooting map at z and J = |det d(s, x)/dz|.
// Meant for small grids.
ScalarField backproject_general(const Metric& metric, const Sinogram& sino,
                                const GridSpec& out_grid, const InvertOptions& opts = {});

// backproject(sinogram(f)) on out_grid; Minkowski uses the closed-form
// adjoint, other metrics the brute-force one. In the Minkowski case at most
// batch_values sinogram samples are held at once; directions are processed
// in batches and their backprojections summed.
ScalarField normal(const Metric& metric, const Integrand& f, const Weight& kappa,
                   const SinogramSpec& spec, const GridSpec& out_grid,
                   std::size_t batch_values = std::size_t{1} << 25);

}  // namespace lightray
