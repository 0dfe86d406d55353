#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "lightray/geometry.hpp"
#include "lightray/linalg.hpp"

namespace lightray {

// A null geodesic issued from (0, x) on the t = 0 slice with initial
// velocity (1, theta), theta unit in the induced spatial metric.
struct LightGeodesic {
  Vec x;
  Vec theta;
  double s_min = -1.0;
  double s_max = 1.0;
  double step = 1e-3;
};

// Samples of a traced geodesic on the uniform grid s_k = k * step, ascending.
struct GeodesicPath {
  int dim = 0;
  double step = 0.0;
  std::vector<double> s;
  std::vector<double> z;      // size() * dim, point-major
  std::vector<double> p;      // size() * dim, covariant momenta
  std::vector<double> drift;  // g^{-1}(p, p)

  [[nodiscard]] std::size_t size() const { return s.size(); }
  [[nodiscard]] Vec point(std::size_t k) const;
  [[nodiscard]] Vec momentum(std::size_t k) const;
  [[nodiscard]] double max_drift() const;
};

struct TraceOptions {
  // Project p back onto the null cone every renormalize_every steps.
  bool renormalize = false;
  int renormalize_every = 100;
  double drift_abort = 1e-4;
};

// z0 = (0, x) and p0 = lower((1, theta_raw / |theta_raw|_h)).
std::pair<SpacetimePoint, Cotangent> initial_data(const Metric& metric, const Vec& x,
                                                  const Vec& theta_raw);

// Classical RK4 on Hamilton's equations with a fixed step. Minkowski is traced
// in closed form.
GeodesicPath trace(const Metric& metric, const LightGeodesic& geo,
                   const TraceOptions& opts = {});

// Same integrator from an arbitrary initial point and covariant momentum.
GeodesicPath trace_from(const Metric& metric, const Vec& z0, const Vec& p0, double s_min,
                        double s_max, double step, const TraceOptions& opts = {});

struct PhasePoint {
  Vec z;
  Vec p;
};

// Integrates from s = 0 to s with ceil(|s| / max_step) equal RK4 steps. The
// result is a smooth function of s and of the initial data for step counts
// that do not change, which keeps shooting-map derivatives well defined.
PhasePoint shoot(const Metric& metric, const Vec& z0, const Vec& p0, double s,
                 double max_step = 1e-3);

// Parameter window outside of which the path never re-enters a region.
struct ExitWindow {
  double s_minus = 0.0;
  double s_plus = 0.0;
  bool trapped = false;
  [[nodiscard]] bool empty() const { return !trapped && s_minus == s_plus; }
};

ExitWindow exit_interval(const GeodesicPath& path, const Box& region);
ExitWindow exit_interval(const GeodesicPath& path,
                         const std::function<bool(const Vec&)>& inside);

struct InverseExp {
  double s = 0.0;
  Vec x;
  int iterations = 0;
  double residual = 0.0;
};

struct InvertOptions {
  int max_iterations = 50;
  double tolerance = 1e-9;
  double max_step = 1e-3;
};

// Solves gamma_{x, theta}(s) = z for (s, x) by Newton iteration on the
// shooting map, starting from s = t, x = z' - t theta. theta is normalised in
// the spatial metric at (0, x) on every evaluation.
InverseExp invert_exp_direction(const Metric& metric, const Vec& theta,
                                const SpacetimePoint& z, const InvertOptions& opts = {});

// invert_exp_direction with theta = theta(q) from ThetaFamily.
InverseExp invert_exp(const Metric& metric, double q, const SpacetimePoint& z,
                      const InvertOptions& opts = {});

}  // namespace lightray
