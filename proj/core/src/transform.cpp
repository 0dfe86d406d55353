#include "lightray/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "lightray/error.hpp"
#include "lightray/parallel.hpp"

namespace lightray {

double DirectionGrid::total_weight() const {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

DirectionGrid DirectionGrid::circle(std::size_t count, double offset) {
  if (count == 0) throw InvalidArgument("direction grid: count must be positive");
  DirectionGrid g;
  g.kind = Kind::Uniform;
  const double w = 2.0 * std::numbers::pi / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = offset + w * static_cast<double>(k);
    Vec th(2);
    th << std::cos(a), std::sin(a);
    g.directions.push_back(th);
    g.weights.push_back(w);
  }
  return g;
}

DirectionGrid DirectionGrid::fibonacci(std::size_t count) {
  if (count == 0) throw InvalidArgument("direction grid: count must be positive");
  DirectionGrid g;
  g.kind = Kind::Fibonacci;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double w = 4.0 * std::numbers::pi / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Vec th(3);
    th << r * std::cos(phi), r * std::sin(phi), z;
    g.directions.push_back(th);
    g.weights.push_back(w);
  }
  return g;
}

DirectionGrid DirectionGrid::standard(int n, std::size_t count) {
  if (n == 2) return circle(count);
  if (n == 3) return fibonacci(count);
  throw InvalidArgument("direction grid: standard grids exist for n = 2, 3 only");
}

DirectionGrid DirectionGrid::list(std::vector<Vec> directions, std::vector<double> weights) {
  if (weights.empty()) weights.assign(directions.size(), 1.0);
  if (weights.size() != directions.size()) {
    throw InvalidArgument("direction grid: weight count mismatch");
  }
  DirectionGrid g;
  g.kind = Kind::Explicit;
  for (auto& d : directions) {
    const double norm = d.norm();
    if (norm == 0.0) throw InvalidArgument("direction grid: zero direction");
    g.directions.push_back(d / norm);
  }
  g.weights = std::move(weights);
  return g;
}

Integrand Integrand::of(const ScalarField& field) {
  const GridSpec& g = field.grid();
  const auto hi = g.upper();
  Box box{Eigen::Map<const Eigen::VectorXd>(g.origin.data(), g.ndim()),
          Eigen::Map<const Eigen::VectorXd>(hi.data(), g.ndim())};
  return {[&field](const Vec& z) { return field.interpolate(z); }, box};
}

Integrand Integrand::of(const Phantom& phantom) {
  return {[&phantom](const Vec& z) { return phantom(z); }, phantom.bounding_box()};
}

Vec Sinogram::x_point(std::size_t ix) const {
  const int n = x_grid.ndim();
  Vec x(n);
  for (int a = n - 1; a >= 0; --a) {
    const std::size_t i = ix % x_grid.dims[a];
    ix /= x_grid.dims[a];
    x[a] = x_grid.origin[a] + static_cast<double>(i) * x_grid.spacing[a];
  }
  return x;
}

double Sinogram::interpolate(std::size_t itheta, const Vec& x) const {
  const auto strides = row_major_strides(x_grid.dims);
  return multilinear(values.data() + itheta * num_x(), x_grid, strides.data(), x.data());
}

double simpson_on_lattice(const std::function<double(double)>& g, double a, double b,
                          double h) {
  if (!(h > 0)) throw InvalidArgument("quadrature step must be positive");
  if (!(b > a)) return 0.0;
  const auto k0 = static_cast<long>(std::floor(a / h));
  auto k1 = static_cast<long>(std::ceil(b / h));
  if ((k1 - k0) % 2 != 0) ++k1;
  double ends = g(static_cast<double>(k0) * h) + g(static_cast<double>(k1) * h);
  double odd = 0.0;
  double even = 0.0;
  for (long k = k0 + 1; k < k1; ++k) {
    const double v = g(static_cast<double>(k) * h);
    if ((k - k0) % 2 != 0) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

namespace {

// Parameter interval where the straight line (s, x + s theta) meets the box.
bool clip_line(const Vec& x, const Vec& theta, const Box& box, double& a, double& b) {
  a = box.lo[0];
  b = box.hi[0];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double lo = box.lo[i + 1] - x[i];
    const double hi = box.hi[i + 1] - x[i];
    if (theta[i] == 0.0) {
      if (lo > 0.0 || hi < 0.0) return false;
      continue;
    }
    double s0 = lo / theta[i];
    double s1 = hi / theta[i];
    if (s0 > s1) std::swap(s0, s1);
    a = std::max(a, s0);
    b = std::min(b, s1);
  }
  return a <= b;
}

double forward_flat(const Integrand& f, const Weight& kappa, const Vec& x, const Vec& theta,
                    double step) {
  const Vec th = theta / theta.norm();
  double a = 0.0;
  double b = 0.0;
  if (!clip_line(x, th, f.support, a, b)) return 0.0;
  const int n = static_cast<int>(x.size());
  Vec z(n + 1);
  Vec v(n + 1);
  v[0] = 1.0;
  v.tail(n) = th;
  const bool unit = kappa.is_unit();
  // One step of margin on each side keeps the window closed under rounding.
  return simpson_on_lattice(
      [&](double s) {
        z[0] = s;
        z.tail(n) = x + s * th;
        const double val = f.f(z);
        if (val == 0.0 || unit) return val;
        return kappa(z, v) * val;
      },
      a - step, b + step, step);
}

double forward_traced(const Metric& metric, const Integrand& f, const Weight& kappa,
                      const LightGeodesic& geo) {
  const GeodesicPath path = trace(metric, geo);
  const ExitWindow w = exit_interval(path, f.support);
  if (w.trapped) throw NumericalFailure("trapped geodesic: the support is not exited");
  if (w.empty()) return 0.0;
  const double h = path.step;
  auto i0 = static_cast<std::size_t>(std::lround((w.s_minus - path.s.front()) / h));
  auto i1 = static_cast<std::size_t>(std::lround((w.s_plus - path.s.front()) / h));
  if ((i1 - i0) % 2 != 0) {
    if (i1 + 1 < path.size()) {
      ++i1;
    } else {
      --i0;
    }
  }
  auto value = [&](std::size_t k) {
    const Vec z = path.point(k);
    const double val = f.f(z);
    if (val == 0.0 || kappa.is_unit()) return val;
    const Vec v = metric.g_inv(z) * path.momentum(k);
    return kappa(z, v) * val;
  };
  double acc = value(i0) + value(i1);
  for (std::size_t k = i0 + 1; k < i1; ++k) acc += ((k - i0) % 2 != 0 ? 4.0 : 2.0) * value(k);
  return acc * h / 3.0;
}

// Parameter window long enough for any ray from the box's shadow to cross
// the box.
double crossing_bound(const Box& box) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
    m = std::max({m, std::abs(box.lo[i]), std::abs(box.hi[i])});
  }
  return 2.0 * m + 1.0;
}

}  // namespace

double forward(const Metric& metric, const Integrand& f, const Weight& kappa,
               const LightGeodesic& geo) {
  if (geo.x.size() != metric.spatial_dim() || geo.theta.size() != metric.spatial_dim()) {
    throw InvalidArgument("forward: dimension mismatch");
  }
  if (metric.is_flat()) {
    if (geo.theta.squaredNorm() == 0.0) throw InvalidArgument("forward: theta is zero");
    return forward_flat(f, kappa, geo.x, geo.theta, geo.step);
  }
  return forward_traced(metric, f, kappa, geo);
}

double forward(const Metric& metric, const ScalarField& field, const Weight& kappa,
               const LightGeodesic& geo) {
  return forward(metric, Integrand::of(field), kappa, geo);
}

double forward(const Metric& metric, const Phantom& phantom, const Weight& kappa,
               const LightGeodesic& geo) {
  return forward(metric, Integrand::of(phantom), kappa, geo);
}

bool covers_shadow(const GridSpec& x_grid, const DirectionGrid& directions, const Box& support) {
  const int n = x_grid.ndim();
  const auto hi = x_grid.upper();
  const unsigned corners = 1u << (n + 1);
  for (const Vec& th : directions.directions) {
    for (unsigned c = 0; c < corners; ++c) {
      Vec z(n + 1);
      for (int a = 0; a <= n; ++a) z[a] = (c & (1u << a)) ? support.hi[a] : support.lo[a];
      for (int a = 0; a < n; ++a) {
        const double x = z[a + 1] - z[0] * th[a];
        if (x < x_grid.origin[a] || x > hi[a]) return false;
      }
    }
  }
  return true;
}

Sinogram sinogram(const Metric& metric, const Integrand& f, const Weight& kappa,
                  const SinogramSpec& spec) {
  const int n = metric.spatial_dim();
  spec.x_grid.validate();
  if (spec.x_grid.ndim() != n || spec.directions.spatial_dim() != n) {
    throw InvalidArgument("sinogram: grid dimensions do not match the metric");
  }
  Sinogram out;
  out.x_grid = spec.x_grid;
  out.directions = spec.directions;
  out.step = spec.step;
  out.metric_id = metric.id();
  out.weight_id = kappa.id();
  out.covers_shadow = covers_shadow(spec.x_grid, spec.directions, f.support);
  const std::size_t nx = out.num_x();
  out.values.assign(nx * out.num_theta(), 0.0);
  const double bound = crossing_bound(f.support);
  parallel_for(out.num_theta(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t it = begin; it < end; ++it) {
      LightGeodesic geo{Vec(), spec.directions.directions[it], -bound, bound, spec.step};
      for (std::size_t ix = 0; ix < nx; ++ix) {
        geo.x = out.x_point(ix);
        try {
          out.values[it * nx + ix] = forward(metric, f, kappa, geo);
        } catch (const Error& e) {
          std::ostringstream msg;
          msg << "sinogram: line (theta " << it << ", x " << ix << ") failed: " << e.what();
          throw NumericalFailure(msg.str());
        }
      }
    }
  });
  return out;
}

ScalarField backproject(const Sinogram& sino, const GridSpec& out_grid) {
  const int n = sino.x_grid.ndim();
  out_grid.validate();
  if (out_grid.ndim() != n + 1) throw InvalidArgument("backproject: output rank must be n + 1");
  if (sino.values.size() != sino.num_x() * sino.num_theta()) {
    throw InvalidArgument("backproject: sinogram size mismatch");
  }
  const GridSpec& xg = sino.x_grid;
  const auto xhi = xg.upper();
  const auto ohi = out_grid.upper();

  if (!sino.covers_shadow) {
    // Light-speed margin: x +- |t| must stay inside the x-grid on every axis.
    std::size_t bad = 0;
    std::ostringstream cells;
    ScalarField probe(out_grid);
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const Vec z = probe.point(i);
      const double t = std::abs(z[0]);
      bool ok = true;
      for (int a = 0; a < n; ++a) {
        ok = ok && z[a + 1] - t >= xg.origin[a] - 1e-12 && z[a + 1] + t <= xhi[a] + 1e-12;
      }
      if (!ok) {
        if (bad < 5) cells << (bad ? ", " : "") << i;
        ++bad;
      }
    }
    if (bad) {
      throw InvalidArgument("backproject: " + std::to_string(bad) +
                            " output cells outside the sinogram coverage (first: " +
                            cells.str() + ")");
    }
  }

  ScalarField out(out_grid);
  const auto xstrides = row_major_strides(xg.dims);
  const std::size_t nx = sino.num_x();
  const std::size_t slab = out.size() / out_grid.dims[0];

  // Per-direction bounding box of the nonzero sinogram samples, widened by
  // one cell so that interpolation outside it is exactly zero.
  std::vector<std::vector<double>> nz_lo(sino.num_theta()), nz_hi(sino.num_theta());
  std::vector<bool> nz_any(sino.num_theta(), false);
  for (std::size_t it = 0; it < sino.num_theta(); ++it) {
    std::vector<double> lo(n, 1e300), hi(n, -1e300);
    const auto row = sino.row(it);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (row[ix] == 0.0) continue;
      nz_any[it] = true;
      const Vec x = sino.x_point(ix);
      for (int a = 0; a < n; ++a) {
        lo[a] = std::min(lo[a], x[a] - xg.spacing[a]);
        hi[a] = std::max(hi[a], x[a] + xg.spacing[a]);
      }
    }
    nz_lo[it] = lo;
    nz_hi[it] = hi;
  }

  std::vector<std::size_t> spatial_dims(out_grid.dims.begin() + 1, out_grid.dims.end());
  const auto sstrides = row_major_strides(spatial_dims);

  parallel_for(out_grid.dims[0], [&](std::size_t begin, std::size_t end) {
    std::size_t ilo[kMaxDim], ihi[kMaxDim], idx[kMaxDim];
    double u[kMaxDim];
    for (std::size_t ti = begin; ti < end; ++ti) {
      const double t = out_grid.origin[0] + static_cast<double>(ti) * out_grid.spacing[0];
      double* dst = out.data().data() + ti * slab;
      for (std::size_t it = 0; it < sino.num_theta(); ++it) {
        if (!nz_any[it]) continue;
        const Vec& th = sino.directions.directions[it];
        const double w = sino.directions.weights[it];
        bool empty = false;
        for (int a = 0; a < n; ++a) {
          // Output x with x - t theta inside the nonzero box.
          const double o = out_grid.origin[a + 1];
          const double h = out_grid.spacing[a + 1];
          const double lo = std::max(nz_lo[it][a] + t * th[a], o);
          const double hi = std::min(nz_hi[it][a] + t * th[a], ohi[a + 1]);
          if (lo > hi) {
            empty = true;
            break;
          }
          ilo[a] = static_cast<std::size_t>(std::max(0.0, std::floor((lo - o) / h)));
          ihi[a] = std::min(spatial_dims[a] - 1,
                            static_cast<std::size_t>(std::ceil((hi - o) / h)));
        }
        if (empty) continue;
        const double* row = sino.values.data() + it * nx;
        for (int a = 0; a < n; ++a) idx[a] = ilo[a];
        for (;;) {
          std::size_t off = 0;
          for (int a = 0; a < n; ++a) {
            u[a] = out_grid.origin[a + 1] + static_cast<double>(idx[a]) * out_grid.spacing[a + 1] -
                   t * th[a];
            off += idx[a] * sstrides[a];
          }
          dst[off] += w * multilinear(row, xg, xstrides.data(), u);
          int a = n - 1;
          while (a >= 0 && idx[a] == ihi[a]) {
            idx[a] = ilo[a];
            --a;
          }
          if (a < 0) break;
          ++idx[a];
        }
      }
    }
  });
  return out;
}

namespace {

// |det d(s, x)/dz| at the solution, from central differences of the
// shooting map (s, x) -> gamma_{x, theta}(s).
double inverse_jacobian(const Metric& metric, const Vec& theta, double s, const Vec& x,
                        double max_step) {
  const int n = metric.spatial_dim();
  auto forward_map = [&](const Vec& u) -> Vec {
    const auto [z0, p0] = initial_data(metric, u.tail(n), theta);
    return shoot(metric, z0.coords, p0.components, u[0], max_step).z;
  };
  Vec u(n + 1);
  u[0] = s;
  u.tail(n) = x;
  Mat jac(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) {
    const double delta = 1e-6 * std::max(1.0, std::abs(u[j]));
    Vec up = u;
    Vec um = u;
    up[j] += delta;
    um[j] -= delta;
    jac.col(j) = (forward_map(up) - forward_map(um)) / (2.0 * delta);
  }
  const double det = jac.determinant();
  if (det == 0.0) throw NumericalFailure("backproject: singular shooting map");
  return 1.0 / std::abs(det);
}

}  // namespace

ScalarField backproject_general(const Metric& metric, const Sinogram& sino,
                                const GridSpec& out_grid, const InvertOptions& opts) {
  const int n = metric.spatial_dim();
  out_grid.validate();
  if (out_grid.ndim() != n + 1 || sino.x_grid.ndim() != n) {
    throw InvalidArgument("backproject: dimension mismatch");
  }
  ScalarField out(out_grid);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SpacetimePoint z(out.point(i));
      double acc = 0.0;
      for (std::size_t it = 0; it < sino.num_theta(); ++it) {
        const Vec& th = sino.directions.directions[it];
        const InverseExp inv = invert_exp_direction(metric, th, z, opts);
        const double g = sino.interpolate(it, inv.x);
        if (g == 0.0) continue;
        acc += sino.directions.weights[it] * g *
               inverse_jacobian(metric, th, inv.s, inv.x, opts.max_step);
      }
      out[i] = acc;
    }
  });
  return out;
}

ScalarField normal(const Metric& metric, const Integrand& f, const Weight& kappa,
                   const SinogramSpec& spec, const GridSpec& out_grid, std::size_t batch_values) {
  if (!metric.is_flat()) {
    return backproject_general(metric, sinogram(metric, f, kappa, spec), out_grid);
  }
  // L'L is a sum over directions, so the sinogram is built and
  // backprojected in batches that bound its memory.
  const std::size_t total = spec.directions.size();
  const std::size_t batch = std::max<std::size_t>(1, batch_values / spec.x_grid.size());
  if (batch >= total) return backproject(sinogram(metric, f, kappa, spec), out_grid);
  ScalarField out(out_grid);
  for (std::size_t first = 0; first < total; first += batch) {
    const std::size_t last = std::min(total, first + batch);
    SinogramSpec part = spec;
    part.directions.directions.assign(spec.directions.directions.begin() + first,
                                      spec.directions.directions.begin() + last);
    part.directions.weights.assign(spec.directions.weights.begin() + first,
                                   spec.directions.weights.begin() + last);
    const ScalarField piece = backproject(sinogram(metric, f, kappa, part), out_grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += piece[i];
  }
  return out;
}

}  // namespace lightray
