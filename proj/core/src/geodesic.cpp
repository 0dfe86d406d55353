#include "lightray/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lightray/error.hpp"
#include "lightray/theta_family.hpp"

namespace lightray {

Vec GeodesicPath::point(std::size_t k) const {
  return Eigen::Map<const Eigen::VectorXd>(z.data() + k * dim, dim);
}

Vec GeodesicPath::momentum(std::size_t k) const {
  return Eigen::Map<const Eigen::VectorXd>(p.data() + k * dim, dim);
}

double GeodesicPath::max_drift() const {
  double m = 0.0;
  for (double r : drift) m = std::max(m, std::abs(r));
  return m;
}

std::pair<SpacetimePoint, Cotangent> initial_data(const Metric& metric, const Vec& x,
                                                  const Vec& theta_raw) {
  const int n = metric.spatial_dim();
  if (x.size() != n || theta_raw.size() != n) {
    throw InvalidArgument("initial_data: x and theta must have the spatial dimension");
  }
  if (theta_raw.squaredNorm() == 0.0) throw InvalidArgument("initial_data: theta is zero");
  Vec z0 = Vec::Zero(n + 1);
  z0.tail(n) = x;
  const Mat g = metric.g(z0);
  constexpr double tol = 1e-12;
  if (std::abs(g(0, 0) + 1.0) > tol || g.row(0).tail(n).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("initial_data: metric is not of the form -dt^2 + h at the slice");
  }
  const Mat h = g.bottomRightCorner(n, n);
  const double norm_h = std::sqrt(theta_raw.dot(h * theta_raw));
  Vec v(n + 1);
  v[0] = 1.0;
  v.tail(n) = theta_raw / norm_h;
  return {SpacetimePoint{z0}, Cotangent{g * v}};
}

namespace {

struct State {
  Vec z;
  Vec p;
};

void rk4_step(const Metric& metric, State& st, double h) {
  Vec k1z, k1p, k2z, k2p, k3z, k3p, k4z, k4p;
  metric.hamiltonian_rhs(st.z, st.p, k1z, k1p);
  metric.hamiltonian_rhs(st.z + 0.5 * h * k1z, st.p + 0.5 * h * k1p, k2z, k2p);
  metric.hamiltonian_rhs(st.z + 0.5 * h * k2z, st.p + 0.5 * h * k2p, k3z, k3p);
  metric.hamiltonian_rhs(st.z + h * k3z, st.p + h * k3p, k4z, k4p);
  st.z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
  st.p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

double null_residual(const Metric& metric, const State& st) {
  return st.p.dot(metric.g_inv(st.z) * st.p);
}

// Re-solves for p_0 so that g^{-1}(p, p) = 0, keeping the spatial momenta and
// choosing the root closest to the current p_0.
void project_to_null_cone(const Metric& metric, State& st) {
  const Mat gi = metric.g_inv(st.z);
  const int d = static_cast<int>(st.p.size());
  const Vec ps = st.p.tail(d - 1);
  const double a = gi(0, 0);
  const double b = 2.0 * gi.row(0).tail(d - 1).dot(ps);
  const double c = ps.dot(gi.bottomRightCorner(d - 1, d - 1) * ps);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0 || a == 0) return;
  const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
  const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
  st.p[0] = std::abs(r1 - st.p[0]) < std::abs(r2 - st.p[0]) ? r1 : r2;
}

void check_state(const State& st) {
  if (!st.z.allFinite() || !st.p.allFinite()) {
    throw NumericalFailure("metric degenerate along the path");
  }
}

}  // namespace

GeodesicPath trace_from(const Metric& metric, const Vec& z0, const Vec& p0, double s_min,
                        double s_max, double step, const TraceOptions& opts) {
  if (!(step > 0)) throw InvalidArgument("trace: step must be positive");
  if (!(s_min <= s_max)) throw InvalidArgument("trace: s_min must not exceed s_max");
  const int d = metric.dim();
  if (z0.size() != d || p0.size() != d) throw InvalidArgument("trace: dimension mismatch");

  const auto k_lo = static_cast<long>(std::floor(s_min / step + 1e-9));
  const auto k_hi = static_cast<long>(std::ceil(s_max / step - 1e-9));
  if (k_lo > 0 || k_hi < 0) {
    throw InvalidArgument("trace: the parameter window must contain s = 0");
  }
  const auto count = static_cast<std::size_t>(k_hi - k_lo + 1);

  GeodesicPath path;
  path.dim = d;
  path.step = step;
  path.s.resize(count);
  path.z.resize(count * d);
  path.p.resize(count * d);
  path.drift.resize(count);

  auto store = [&](long k, const State& st, double r) {
    const auto idx = static_cast<std::size_t>(k - k_lo);
    path.s[idx] = static_cast<double>(k) * step;
    for (int i = 0; i < d; ++i) {
      path.z[idx * d + i] = st.z[i];
      path.p[idx * d + i] = st.p[i];
    }
    path.drift[idx] = r;
  };

  if (metric.is_flat()) {
    const Vec v = metric.g_inv(z0) * p0;
    const double r = p0.dot(v);
    for (long k = k_lo; k <= k_hi; ++k) {
      const double s = static_cast<double>(k) * step;
      store(k, State{z0 + s * v, p0}, r);
    }
    return path;
  }

  auto integrate = [&](long k_end, double h) {
    State st{z0, p0};
    long k = 0;
    const long dir = h > 0 ? 1 : -1;
    int since_projection = 0;
    while (k != k_end) {
      rk4_step(metric, st, h);
      k += dir;
      check_state(st);
      if (opts.renormalize && ++since_projection >= opts.renormalize_every) {
        project_to_null_cone(metric, st);
        since_projection = 0;
      }
      const double r = null_residual(metric, st);
      if (!(std::abs(r) <= opts.drift_abort)) {
        throw NumericalFailure("integration unreliable: null drift " + std::to_string(r) +
                               " at s = " + std::to_string(static_cast<double>(k) * step));
      }
      if (k >= k_lo && k <= k_hi) store(k, st, r);
    }
  };

  const State start{z0, p0};
  store(0, start, null_residual(metric, start));
  if (k_hi > 0) integrate(k_hi, step);
  if (k_lo < 0) integrate(k_lo, -step);
  return path;
}

GeodesicPath trace(const Metric& metric, const LightGeodesic& geo, const TraceOptions& opts) {
  const auto [z0, p0] = initial_data(metric, geo.x, geo.theta);
  return trace_from(metric, z0.coords, p0.components, geo.s_min, geo.s_max, geo.step, opts);
}

PhasePoint shoot(const Metric& metric, const Vec& z0, const Vec& p0, double s,
                 double max_step) {
  if (metric.is_flat()) return {z0 + s * (metric.g_inv(z0) * p0), p0};
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(s) / max_step)));
  const double h = s / static_cast<double>(steps);
  State st{z0, p0};
  if (s == 0.0) return {st.z, st.p};
  for (long k = 0; k < steps; ++k) rk4_step(metric, st, h);
  check_state(st);
  return {st.z, st.p};
}

ExitWindow exit_interval(const GeodesicPath& path,
                         const std::function<bool(const Vec&)>& inside) {
  const std::size_t count = path.size();
  std::size_t first = count;
  std::size_t last = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (inside(path.point(k))) {
      if (first == count) first = k;
      last = k;
    }
  }
  ExitWindow w;
  if (first == count) {
    w.s_minus = w.s_plus = count ? path.s.front() : 0.0;
    return w;
  }
  if (first == 0 || last + 1 == count) {
    w.trapped = true;
    w.s_minus = path.s.front();
    w.s_plus = path.s.back();
    return w;
  }
  w.s_minus = path.s[first - 1];
  w.s_plus = path.s[last + 1];
  return w;
}

ExitWindow exit_interval(const GeodesicPath& path, const Box& region) {
  return exit_interval(path, [&](const Vec& z) { return region.contains(z); });
}

InverseExp invert_exp_direction(const Metric& metric, const Vec& theta,
                                const SpacetimePoint& z, const InvertOptions& opts) {
  const int n = metric.spatial_dim();
  const int d = n + 1;
  if (z.dim() != d || theta.size() != n) throw InvalidArgument("invert_exp: dimension mismatch");

  auto forward = [&](const Vec& u) -> Vec {
    const auto [z0, p0] = initial_data(metric, u.tail(n), theta);
    return shoot(metric, z0.coords, p0.components, u[0], opts.max_step).z;
  };

  // Initial guess from the flat-space expansion s = t, x = x' - t theta.
  const double t = z.t();
  Vec u(d);
  u[0] = t;
  u.tail(n) = z.x() - t * theta / theta.norm();

  Vec r = forward(u) - z.coords;
  double res = r.norm();
  const double scale = std::max(1.0, z.coords.norm());
  int it = 0;
  for (; it < opts.max_iterations && res > 0.0; ++it) {
    Mat jac(d, d);
    for (int j = 0; j < d; ++j) {
      const double delta = 1e-7 * std::max(1.0, std::abs(u[j]));
      Vec up = u;
      Vec um = u;
      up[j] += delta;
      um[j] -= delta;
      jac.col(j) = (forward(up) - forward(um)) / (2.0 * delta);
    }
    const Vec du = jac.partialPivLu().solve(r);
    if (!du.allFinite()) break;
    // Backtracking keeps the iteration monotone; once converged it keeps
    // polishing while the residual still decreases and stops at roundoff.
    Vec u_next;
    Vec r_next;
    double res_next = res;
    double lambda = 1.0;
    for (int ls = 0; ls < 6; ++ls, lambda *= 0.5) {
      u_next = u - lambda * du;
      r_next = forward(u_next) - z.coords;
      res_next = r_next.norm();
      if (res_next < res) break;
    }
    if (!(res_next < res)) break;
    u = u_next;
    r = r_next;
    res = res_next;
  }
  if (!(res <= opts.tolerance * scale)) {
    throw NumericalFailure("outside invertibility neighborhood (residual " +
                           std::to_string(res) + ")");
  }
  return InverseExp{u[0], u.tail(n), it, res};
}

InverseExp invert_exp(const Metric& metric, double q, const SpacetimePoint& z,
                      const InvertOptions& opts) {
  return invert_exp_direction(metric, ThetaFamily{metric.spatial_dim()}(q), z, opts);
}

}  // namespace lightray
