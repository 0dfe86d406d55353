#include "lightray/radon_reduction.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lightray/error.hpp"

namespace lightray {

Vec zeta_of(double q, const Vec& xi) {
  const int n = static_cast<int>(xi.size());
  Vec z(n + 1);
  z[0] = -ThetaFamily{n}(q).dot(xi);
  z.tail(n) = xi;
  return z;
}

bool TimelikePlane::contains(const Vec& z, double tol) const {
  return std::abs(z.dot(zeta()) - p) <= tol;
}

bool TimelikePlane::contains_by_rays(const Vec& z, double tol) const {
  const int n = spatial_dim();
  const Vec x0 = z.tail(n) - z[0] * theta();
  return std::abs(x0.dot(xi) - p) <= tol;
}

Vec TimelikePlane::base_point() const { return p * xi / xi.squaredNorm(); }

Mat TimelikePlane::base_frame() const {
  const int n = spatial_dim();
  // Gram-Schmidt on xi followed by the coordinate axes.
  Mat a(n, n);
  a.col(0) = xi / xi.norm();
  int col = 1;
  for (int k = 0; k < n && col < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = 1.0;
    for (int j = 0; j < col; ++j) e -= a.col(j).dot(e) * a.col(j);
    const double norm = e.norm();
    if (norm > 1e-8) a.col(col++) = e / norm;
  }
  return a.rightCols(n - 1);
}

TimelikePlane plane_from_rays(double p, const Vec& xi, double q) {
  const int n = static_cast<int>(xi.size());
  if (n < 2) throw InvalidArgument("plane: spatial dimension must be at least 2");
  if (xi.squaredNorm() == 0.0) throw InvalidArgument("plane: xi must be nonzero");
  TimelikePlane plane{p, xi, q};
  const double along = std::abs(plane.theta().dot(xi));
  if (!(along < xi.norm() * (1.0 - 1e-12))) {
    throw InvalidArgument("plane: not timelike, xi is parallel to theta(q)");
  }
  return plane;
}

double solve_q_residual(const Vec& zeta, double q) {
  const int n = static_cast<int>(zeta.size()) - 1;
  return std::abs(zeta[n] * std::cos(q) + zeta[n - 1] * std::sin(q) + zeta[0]);
}

double solve_q(const Vec& zeta, const SolveQOptions& opts) {
  const int n = static_cast<int>(zeta.size()) - 1;
  if (n < 2) throw InvalidArgument("solve_q: covector too short");
  const double norm = zeta.norm();
  if (norm == 0.0) throw InvalidArgument("solve_q: zero covector");
  Vec e = Vec::Zero(n + 1);
  e[n - 1] = 1.0;
  if ((zeta / norm - e).norm() >= opts.neighborhood) {
    throw InvalidArgument("solve_q: outside solvable neighborhood");
  }
  const double a = zeta[n];
  const double b = zeta[n - 1];
  const double c = -zeta[0];
  // a cos q + b sin q = r cos(q - phi).
  const double r = std::hypot(a, b);
  if (std::abs(c) > r) throw NumericalFailure("solve_q: outside solvable neighborhood");
  const double phi = std::atan2(b, a);
  const double spread = std::acos(c / r);
  double q = phi - spread;
  for (double cand : {phi + spread, phi - spread, phi + spread - 2 * std::numbers::pi,
                      phi - spread + 2 * std::numbers::pi}) {
    if (std::abs(cand) < std::abs(q)) q = cand;
  }
  if (!(std::abs(q) < opts.q_max)) {
    throw NumericalFailure("solve_q: outside solvable neighborhood");
  }
  // Newton polish, kept inside the domain.
  for (int it = 0; it < 20; ++it) {
    const double g = a * std::cos(q) + b * std::sin(q) - c;
    const double dg = -a * std::sin(q) + b * std::cos(q);
    if (g == 0.0 || dg == 0.0) break;
    const double next = q - g / dg;
    if (!(std::abs(next) < opts.q_max)) break;
    if (std::abs(next - q) <= 1e-17) {
      q = next;
      break;
    }
    q = next;
  }
  if (solve_q_residual(zeta, q) >= 1e-12 * std::max(1.0, norm)) {
    throw NumericalFailure("solve_q: residual above tolerance");
  }
  return q;
}

Mat diffeo_jacobian_matrix(double q, const Vec& xi) {
  const int n = static_cast<int>(xi.size());
  const ThetaFamily fam{n};
  Mat j = Mat::Zero(n + 1, n + 1);
  j(0, 0) = -fam.derivative(q).dot(xi);
  j.block(0, 1, 1, n) = -fam(q).transpose();
  j.block(1, 1, n, n).setIdentity();
  return j;
}

double diffeo_jacobian(double q, const Vec& xi) {
  return -ThetaFamily{static_cast<int>(xi.size())}.derivative(q).dot(xi);
}

namespace {

// Composite Simpson weights on count = 2m + 1 nodes.
double simpson_weight(std::size_t k, std::size_t count) {
  if (k == 0 || k + 1 == count) return 1.0 / 3.0;
  return k % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0;
}

}  // namespace

RadonResult radon_via_fubini(const Sinogram& sino, const TimelikePlane& plane, double refine) {
  const int n = plane.spatial_dim();
  if (sino.x_grid.ndim() != n) throw InvalidArgument("radon: dimension mismatch");
  if (n - 1 > 2) throw InvalidArgument("radon: implemented for n = 2, 3");
  RadonResult res;
  const Vec th = plane.theta();
  double best = -2.0;
  for (std::size_t i = 0; i < sino.num_theta(); ++i) {
    const double d = sino.directions.directions[i].dot(th);
    if (d > best) {
      best = d;
      res.theta_index = i;
    }
  }
  res.theta_mismatch = (sino.directions.directions[res.theta_index] - th).norm();

  // The base hyperplane meets the x-grid box inside a ball of radius reach
  // around base_point.
  const auto hi = sino.x_grid.upper();
  Vec lo(n), up(n);
  double min_spacing = sino.x_grid.spacing[0];
  for (int a = 0; a < n; ++a) {
    lo[a] = sino.x_grid.origin[a];
    up[a] = hi[a];
    min_spacing = std::min(min_spacing, sino.x_grid.spacing[a]);
  }
  const Vec x0 = plane.base_point();
  const double reach = std::max((x0 - lo).norm(), (x0 - up).norm()) +
                       (0.5 * (lo + up) - x0).norm();
  const double h = min_spacing / refine;
  auto count = static_cast<std::size_t>(std::ceil(2.0 * reach / h));
  if (count % 2 == 1) ++count;
  ++count;  // odd node count
  const double u0 = -0.5 * h * static_cast<double>(count - 1);
  const Mat frame = plane.base_frame();
  const auto strides = row_major_strides(sino.x_grid.dims);
  const double* row = sino.values.data() + res.theta_index * sino.num_x();

  double acc = 0.0;
  Vec x(n);
  if (n == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      x = x0 + (u0 + static_cast<double>(i) * h) * frame.col(0);
      const double v = multilinear(row, sino.x_grid, strides.data(), x.data());
      if (v != 0.0) acc += simpson_weight(i, count) * v;
    }
    res.value = acc * h;
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        x = x0 + (u0 + static_cast<double>(i) * h) * frame.col(0) +
            (u0 + static_cast<double>(j) * h) * frame.col(1);
        const double v = multilinear(row, sino.x_grid, strides.data(), x.data());
        if (v != 0.0) acc += simpson_weight(i, count) * simpson_weight(j, count) * v;
      }
    }
    res.value = acc * h * h;
  }
  return res;
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_m.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Composite Gauss-Legendre rule on [a, b] with panels of length about 1/4.
void composite_rule(double a, double b, int nodes_per_unit, std::vector<double>& x,
                    std::vector<double>& w) {
  constexpr int kPerPanel = 8;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * nodes_per_unit / kPerPanel)));
  std::vector<double> gx, gw;
  gauss_legendre(kPerPanel, gx, gw);
  x.clear();
  w.clear();
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * len;
    for (int k = 0; k < kPerPanel; ++k) {
      x.push_back(mid + 0.5 * len * gx[k]);
      w.push_back(0.5 * len * gw[k]);
    }
  }
}

}  // namespace

double plane_integral(const Phantom& f, const Weight& kappa, const TimelikePlane& plane,
                      int nodes_per_unit) {
  const int n = plane.spatial_dim();
  if (f.spatial_dim() != n) throw InvalidArgument("plane_integral: dimension mismatch");
  if (n - 1 > 2) throw InvalidArgument("plane_integral: implemented for n = 2, 3");
  const Box box = f.bounding_box();
  const Vec th = plane.theta();
  const Vec x0 = plane.base_point();
  const Mat frame = plane.base_frame();
  // x + t theta in the box needs |x - centre| <= spatial radius + |t|.
  const Vec centre = 0.5 * (box.lo + box.hi);
  const double radius = 0.5 * (box.hi - box.lo).tail(n).norm();
  const double tmax = std::max(std::abs(box.lo[0]), std::abs(box.hi[0]));
  const double dist = (x0 - centre.tail(n)).norm();
  const double umax = dist + radius + tmax;

  std::vector<double> tx, tw, ux, uw;
  composite_rule(box.lo[0], box.hi[0], nodes_per_unit, tx, tw);
  composite_rule(-umax, umax, nodes_per_unit, ux, uw);

  Vec v(n + 1);
  v[0] = 1.0;
  v.tail(n) = th;
  Vec z(n + 1);
  auto line = [&](const Vec& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
      z[0] = tx[i];
      z.tail(n) = x + tx[i] * th;
      const double val = f(z);
      if (val != 0.0) acc += tw[i] * kappa(z, v) * val;
    }
    return acc;
  };
  double total = 0.0;
  if (n == 2) {
    for (std::size_t i = 0; i < ux.size(); ++i) total += uw[i] * line(x0 + ux[i] * frame.col(0));
  } else {
    for (std::size_t i = 0; i < ux.size(); ++i) {
      for (std::size_t j = 0; j < ux.size(); ++j) {
        total += uw[i] * uw[j] * line(x0 + ux[i] * frame.col(0) + ux[j] * frame.col(1));
      }
    }
  }
  return total;
}

double phase(const Metric& metric, const SpacetimePoint& z, const Vec& zeta,
             const InvertOptions& opts) {
  const int n = metric.spatial_dim();
  if (zeta.size() != n + 1) throw InvalidArgument("phase: covector dimension mismatch");
  const InverseExp inv = invert_exp(metric, zeta[0], z, opts);
  return inv.x.dot(zeta.tail(n));
}

PhaseHessian phase_det_check(const Metric& metric, double h) {
  const int n = metric.spatial_dim();
  const int d = n + 1;
  Vec zeta0 = Vec::Zero(d);
  zeta0[n - 1] = 1.0;
  auto phi = [&](const Vec& z, const Vec& zeta) { return phase(metric, SpacetimePoint(z), zeta); };
  auto mixed = [&](double step) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        Vec zp = Vec::Zero(d), zm = Vec::Zero(d);
        zp[i] = step;
        zm[i] = -step;
        Vec cp = zeta0, cm = zeta0;
        cp[j] += step;
        cm[j] -= step;
        m(i, j) = (phi(zp, cp) - phi(zp, cm) - phi(zm, cp) + phi(zm, cm)) / (4.0 * step * step);
      }
    }
    return m;
  };
  const Mat coarse = mixed(h);
  const Mat fine = mixed(0.5 * h);
  PhaseHessian out;
  out.mixed = (4.0 * fine - coarse) / 3.0;
  out.det = out.mixed.determinant();
  return out;
}

double phase_slice_derivative_error(const Metric& metric, const Vec& x, double h) {
  const int n = metric.spatial_dim();
  if (x.size() != n) throw InvalidArgument("phase derivative: dimension mismatch");
  Vec z(n + 1);
  z[0] = 0.0;
  z.tail(n) = x;
  const SpacetimePoint zp(z);
  Vec zeta0 = Vec::Zero(n + 1);
  zeta0[n - 1] = 1.0;
  double err = 0.0;
  for (int k = 1; k <= n; ++k) {
    Vec cp = zeta0, cm = zeta0;
    cp[k] += h;
    cm[k] -= h;
    const double deriv = (phase(metric, zp, cp) - phase(metric, zp, cm)) / (2.0 * h);
    err = std::max(err, std::abs(deriv - z[k]));
  }
  return err;
}

}  // namespace lightray
