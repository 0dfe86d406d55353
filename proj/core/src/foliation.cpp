#include "lightray/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "lightray/error.hpp"
#include "lightray/geodesic.hpp"

namespace lightray {
namespace {

std::vector<double> with_defaults(std::span<const double> given, std::vector<double> defaults,
                                  std::string_view id) {
  if (given.size() > defaults.size()) {
    throw InvalidArgument("surface '" + std::string(id) + "': too many parameters");
  }
  for (std::size_t i = 0; i < given.size(); ++i) defaults[i] = given[i];
  return defaults;
}

// Spatial Hessian of |x| written into the (n+1)-dim matrix.
void radial_hessian(const Vec& x, Mat& hess) {
  const int n = static_cast<int>(x.size());
  const double r = x.norm();
  const Vec u = x / r;
  hess = Mat::Zero(n + 1, n + 1);
  hess.bottomRightCorner(n, n) =
      (Mat::Identity(n, n) - u * u.transpose()) / r;
}

class Cylinder : public SurfaceFamily {
 public:
  Cylinder(int n, double R) : n_(n), R_(R) {
    if (!(R > 0)) throw InvalidArgument("cylinder: R must be positive");
  }
  [[nodiscard]] std::string id() const override { return "cylinder"; }
  [[nodiscard]] std::vector<double> params() const override { return {R_}; }
  [[nodiscard]] int spatial_dim() const override { return n_; }
  double eval(const Vec& z, Vec* grad, Mat* hess) const override {
    const Vec x = z.tail(n_);
    const double r = x.norm();
    if (grad) {
      *grad = Vec::Zero(n_ + 1);
      grad->tail(n_) = x / r;
    }
    if (hess) radial_hessian(x, *hess);
    return r - R_;
  }
  [[nodiscard]] bool smooth_at(const Vec& z) const override { return z.tail(n_).norm() > 1e-9; }

 private:
  int n_;
  double R_;
};

class DoubleCone : public SurfaceFamily {
 public:
  DoubleCone(int n, double c, double t_min) : n_(n), c_(c), t_min_(t_min) {
    if (!(c > 0)) throw InvalidArgument("double-cone: c must be positive");
    if (!(t_min > 0)) throw InvalidArgument("double-cone: t_min must be positive");
  }
  [[nodiscard]] std::string id() const override { return "double-cone"; }
  [[nodiscard]] std::vector<double> params() const override { return {c_, t_min_}; }
  [[nodiscard]] int spatial_dim() const override { return n_; }
  double eval(const Vec& z, Vec* grad, Mat* hess) const override {
    const Vec x = z.tail(n_);
    const double r = x.norm();
    if (grad) {
      *grad = Vec::Zero(n_ + 1);
      (*grad)[0] = z[0] > 0 ? -c_ : c_;
      grad->tail(n_) = x / r;
    }
    if (hess) radial_hessian(x, *hess);
    return r - c_ * std::abs(z[0]);
  }
  [[nodiscard]] bool smooth_at(const Vec& z) const override {
    return std::abs(z[0]) > t_min_ && z.tail(n_).norm() > 1e-9;
  }

 private:
  int n_;
  double c_;
  double t_min_;
};

// |x - x0|^2 - a (t - t0)^2 - offset at level(sigma).
class Quadric : public SurfaceFamily {
 public:
  Quadric(std::string id, int n, std::vector<double> params, double a, Vec centre,
          double offset, double lvl_max, double lvl_min)
      : id_(std::move(id)),
        n_(n),
        params_(std::move(params)),
        a_(a),
        centre_(std::move(centre)),
        offset_(offset),
        lvl_max_(lvl_max),
        lvl_min_(lvl_min) {}
  [[nodiscard]] std::string id() const override { return id_; }
  [[nodiscard]] std::vector<double> params() const override { return params_; }
  [[nodiscard]] int spatial_dim() const override { return n_; }
  double eval(const Vec& z, Vec* grad, Mat* hess) const override {
    const Vec d = z - centre_;
    if (grad) {
      *grad = 2.0 * d;
      (*grad)[0] = -2.0 * a_ * d[0];
    }
    if (hess) {
      *hess = 2.0 * Mat::Identity(n_ + 1, n_ + 1);
      (*hess)(0, 0) = -2.0 * a_;
    }
    return d.tail(n_).squaredNorm() - a_ * d[0] * d[0] - offset_;
  }
  [[nodiscard]] double level(double sigma) const override {
    return lvl_max_ - sigma * (lvl_max_ - lvl_min_);
  }
  [[nodiscard]] double sigma_of_level(double value) const override {
    if (lvl_max_ == lvl_min_) return std::nan("");
    return (lvl_max_ - value) / (lvl_max_ - lvl_min_);
  }

 private:
  std::string id_;
  int n_;
  std::vector<double> params_;
  double a_;
  Vec centre_;
  double offset_;
  double lvl_max_;
  double lvl_min_;
};

class Plane : public SurfaceFamily {
 public:
  Plane(int n, int axis, double offset) : n_(n), axis_(axis), offset_(offset) {
    if (axis < 0 || axis > n) throw InvalidArgument("plane: axis out of range");
  }
  [[nodiscard]] std::string id() const override { return "plane"; }
  [[nodiscard]] std::vector<double> params() const override {
    return {static_cast<double>(axis_), offset_};
  }
  [[nodiscard]] int spatial_dim() const override { return n_; }
  double eval(const Vec& z, Vec* grad, Mat* hess) const override {
    if (grad) {
      *grad = Vec::Zero(n_ + 1);
      (*grad)[axis_] = 1.0;
    }
    if (hess) *hess = Mat::Zero(n_ + 1, n_ + 1);
    return z[axis_] - offset_;
  }

 private:
  int n_;
  int axis_;
  double offset_;
};

}  // namespace

SurfacePtr make_surface(std::string_view id, int n, std::span<const double> params) {
  if (n < 2 || n + 1 > kMaxDim) throw InvalidArgument("surface: unsupported dimension");
  if (id == "cylinder") {
    auto p = with_defaults(params, {1.0}, id);
    return std::make_shared<Cylinder>(n, p[0]);
  }
  if (id == "double-cone") {
    auto p = with_defaults(params, {0.5, 0.1}, id);
    return std::make_shared<DoubleCone>(n, p[0], p[1]);
  }
  if (id == "hyperboloid") {
    auto p = with_defaults(params, {0.5, 1.0}, id);
    if (!(p[0] > 0)) throw InvalidArgument("hyperboloid: c must be positive");
    return std::make_shared<Quadric>("hyperboloid", n, p, p[0] * p[0], Vec::Zero(n + 1), p[1],
                                     0.0, 0.0);
  }
  if (id == "plane") {
    auto p = with_defaults(params, {static_cast<double>(n - 1), 0.0}, id);
    const double axis = p[0];
    if (axis != std::floor(axis)) throw InvalidArgument("plane: axis must be an integer");
    return std::make_shared<Plane>(n, static_cast<int>(axis), p[1]);
  }
  if (id == "quadric") {
    std::vector<double> defaults{0.7, 0.5, 3.0};
    defaults.resize(3 + n + 1, 0.0);
    auto p = with_defaults(params, defaults, id);
    const double ct = p[0];
    if (!(ct > 0)) throw InvalidArgument("quadric: c_tilde must be positive");
    if (!(p[2] >= p[1])) throw InvalidArgument("quadric: a_max must not be below a_min");
    Vec centre(n + 1);
    for (int i = 0; i <= n; ++i) centre[i] = p[3 + i];
    return std::make_shared<Quadric>("quadric", n, p, ct * ct, centre, 0.0, p[2], p[1]);
  }
  throw InvalidArgument("unknown surface '" + std::string(id) + "'");
}

std::vector<std::string> surface_ids() {
  return {"cylinder", "double-cone", "hyperboloid", "plane", "quadric"};
}

Mat covariant_hessian(const Metric& metric, const SurfaceFamily& surface, const Vec& z) {
  Vec grad;
  Mat hess;
  surface.eval(z, &grad, &hess);
  if (metric.is_flat()) return hess;
  const Christoffel gamma = christoffel(metric, SpacetimePoint(z));
  Mat out = hess;
  for (int k = 0; k < metric.dim(); ++k) out -= grad[k] * gamma[k];
  return out;
}

bool is_timelike_surface(const Metric& metric, const SurfaceFamily& surface, const Vec& z) {
  Vec grad;
  surface.eval(z, &grad, nullptr);
  if (!(grad.norm() > 0.0)) throw InvalidArgument("surface: dF = 0, condition (ii) violated");
  return classify_covector(metric, SpacetimePoint(z), Cotangent{grad}).kind == Causal::Spacelike;
}

namespace {

// Lightlike directions of ker dF(z): after diagonalising g on an orthonormal
// basis B of the kernel, v(omega) = B V (e_0 / sqrt(-l_0) + sum omega_k e_k / sqrt(l_k)).
struct NullCone {
  Mat basis;  // (n+1) x n, B V scaled
  int n = 0;

  [[nodiscard]] Vec direction(const Vec& omega) const {
    Vec y(n);
    y[0] = 1.0;
    y.tail(n - 1) = omega;
    const Vec v = basis * y;
    return v / v.norm();
  }
  [[nodiscard]] Vec direction(double phi) const {
    Vec omega(n - 1);
    if (n == 2) {
      omega[0] = phi < std::numbers::pi ? 1.0 : -1.0;
    } else {
      omega[0] = std::cos(phi);
      omega[1] = std::sin(phi);
    }
    return direction(omega);
  }
};

NullCone null_cone(const Metric& metric, const SurfaceFamily& surface, const Vec& z) {
  const int n = metric.spatial_dim();
  if (n > 3) throw InvalidArgument("lightlike tangents: implemented for n = 2, 3");
  Vec grad;
  surface.eval(z, &grad, nullptr);
  if (!(grad.norm() > 0.0)) throw InvalidArgument("surface: dF = 0, condition (ii) violated");
  const Mat gcol = grad;
  Eigen::HouseholderQR<Mat> qr(gcol);
  const Mat q = qr.householderQ();
  const Mat b = q.rightCols(n);
  const Mat g_ker = b.transpose() * metric.g(z) * b;
  Eigen::SelfAdjointEigenSolver<Mat> eig(g_ker);
  const Vec lam = eig.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  if (!(lam[0] < -1e-12 * scale) || !(lam[1] > 1e-12 * scale)) {
    throw InvalidArgument("no lightlike tangent directions: the surface is not timelike at z");
  }
  NullCone c;
  c.n = n;
  Mat v = eig.eigenvectors();
  v.col(0) /= std::sqrt(-lam[0]);
  for (int k = 1; k < n; ++k) v.col(k) /= std::sqrt(lam[k]);
  c.basis = b * v;
  return c;
}

double quadratic_form(const Mat& h, const Vec& v) { return v.dot(h * v); }

}  // namespace

std::vector<Vec> lightlike_tangents(const Metric& metric, const SurfaceFamily& surface,
                                    const Vec& z, std::size_t samples) {
  const NullCone cone = null_cone(metric, surface, z);
  std::vector<Vec> out;
  if (cone.n == 2) {
    out.push_back(cone.direction(0.0));
    out.push_back(cone.direction(1.5 * std::numbers::pi));
    return out;
  }
  for (std::size_t k = 0; k < samples; ++k) {
    out.push_back(cone.direction(2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(samples)));
  }
  return out;
}

ConvexityResult strict_convexity_check(const Metric& metric, const SurfaceFamily& surface,
                                       const Vec& z, const ConvexityOptions& opts) {
  const NullCone cone = null_cone(metric, surface, z);
  Mat h = covariant_hessian(metric, surface, z);
  if (opts.convention == SignConvention::InteriorPositive) h = -h;
  Vec grad;
  surface.eval(z, &grad, nullptr);

  ConvexityResult res;
  auto q_of = [&](double phi) { return quadratic_form(h, cone.direction(phi)); };
  if (cone.n == 2) {
    const double a = q_of(0.0);
    const double b = q_of(1.5 * std::numbers::pi);
    res.min_value = std::min(a, b);
    res.witness = cone.direction(a <= b ? 0.0 : 1.5 * std::numbers::pi);
  } else {
    const std::size_t m = std::max<std::size_t>(opts.samples, 8);
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(m);
    double best_phi = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double phi = dphi * static_cast<double>(k);
      const double v = q_of(phi);
      if (v < best) {
        best = v;
        best_phi = phi;
      }
    }
    // Golden-section refinement on the bracketing cells.
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_phi - dphi;
    double b = best_phi + dphi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = q_of(c);
    double fd = q_of(d);
    for (int it = 0; it < 60; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = q_of(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = q_of(d);
      }
    }
    const double phi = fc < fd ? c : d;
    const double refined = std::min(fc, fd);
    if (refined < best) {
      best = refined;
      best_phi = phi;
    }
    res.min_value = best;
    res.witness = cone.direction(best_phi);
  }
  res.strict = res.min_value > opts.tol_conv * std::max(1.0, grad.norm());
  return res;
}

EscapeResult tangent_escape_check(const Metric& metric, const SurfaceFamily& surface,
                                  const Vec& z, const Box& box, double sigma,
                                  const EscapeOptions& opts) {
  const std::vector<Vec> dirs = lightlike_tangents(metric, surface, z, opts.directions);
  double diameter = (box.hi - box.lo).norm();
  EscapeResult res;
  res.min_value = std::numeric_limits<double>::infinity();
  Vec grad;
  surface.eval(z, &grad, nullptr);
  const double zero_tol = 1e-10 * std::max(1.0, grad.norm() * std::max(1.0, z.norm()));
  const double exclusion = opts.exclusion_steps * opts.step;
  for (const Vec& v : dirs) {
    const Vec p = metric.g(z) * v;
    // Euclidean-unit v keeps |dz/ds| <= 1, so the box is left by |s| = diameter.
    const GeodesicPath path = trace_from(metric, z, p, -diameter, diameter, opts.step);
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (std::abs(path.s[k]) <= exclusion) continue;
      const Vec y = path.point(k);
      if (!box.contains(y) || !surface.smooth_at(y)) continue;
      const double f = surface.value(y, sigma);
      if (f < res.min_value) {
        res.min_value = f;
        if (f <= zero_tol) {
          res.escapes = false;
          res.witness = v;
        }
      }
    }
  }
  if (res.escapes && !dirs.empty()) res.witness = dirs.front();
  return res;
}

bool FoliationReport::pass() const {
  if (!disjoint) return false;
  return std::all_of(levels.begin(), levels.end(), [](const LevelVerdict& l) { return l.pass(); });
}

namespace {

Vec draw(std::mt19937_64& rng, const Box& box) {
  Vec z(box.lo.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
    z[i] = u(rng);
  }
  return z;
}

// Newton steps along the gradient onto {F = level}.
bool project(const SurfaceFamily& s, double sigma, Vec& z) {
  for (int it = 0; it < 60; ++it) {
    Vec grad;
    const double f = s.eval(z, &grad, nullptr) - s.level(sigma);
    const double g2 = grad.squaredNorm();
    if (!(g2 > 0)) return false;
    if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(s.level(sigma)))) return true;
    z -= (f / g2) * grad;
    if (!z.allFinite()) return false;
  }
  return false;
}

}  // namespace

FoliationReport foliation_scan(const Metric& metric, const SurfaceFamily& family,
                               std::span<const double> sigma_grid, const Box& support_box,
                               const SupportCone& cone, const ScanOptions& opts) {
  const Box sampling = opts.sampling_box.value_or(support_box);
  FoliationReport report;

  // (i): the sigma = 0 level misses supp f. F - level(0) must keep one sign
  // on the cone region inside the box.
  {
    std::mt19937_64 rng(opts.seed);
    bool any_neg = false;
    bool any_pos = false;
    Vec neg_pt, pos_pt;
    for (std::size_t k = 0; k < opts.cone_samples; ++k) {
      const Vec z = draw(rng, sampling);
      if (!support_box.contains(z) || !cone.contains(z) || !family.smooth_at(z)) continue;
      const double f = family.value(z, 0.0);
      if (f <= 0.0) {
        any_neg = true;
        neg_pt = z;
      }
      if (f >= 0.0) {
        any_pos = true;
        pos_pt = z;
      }
    }
    if (any_neg && any_pos) {
      report.disjoint = false;
      report.disjoint_witness = pos_pt;
    }
  }

  for (std::size_t li = 0; li < sigma_grid.size(); ++li) {
    const double sigma = sigma_grid[li];
    LevelVerdict v;
    v.sigma = sigma;
    v.min_q = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opts.seed + 1 + li);
    for (std::size_t k = 0; k < opts.points_per_level; ++k) {
      Vec z = draw(rng, sampling);
      if (!project(family, sigma, z)) continue;
      if (!support_box.contains(z) || !family.smooth_at(z)) continue;
      ++v.points;
      if (sigma == 0.0 && report.disjoint && cone.contains(z)) {
        report.disjoint = false;
        report.disjoint_witness = z;
      }
      Vec grad;
      family.eval(z, &grad, nullptr);
      if (!(grad.norm() > opts.grad_tol)) {
        if (v.nondegenerate) v.witness_point = z;
        v.nondegenerate = false;
        continue;
      }
      if (!is_timelike_surface(metric, family, z)) {
        if (v.timelike) v.witness_point = z;
        v.timelike = false;
        continue;
      }
      const ConvexityResult c = strict_convexity_check(metric, family, z, opts.convexity);
      if (c.min_value < v.min_q) {
        v.min_q = c.min_value;
        if (v.timelike && v.nondegenerate && v.convex) {
          v.witness_point = z;
          v.witness_direction = c.witness;
        }
      }
      if (!c.strict) {
        if (v.convex) {
          v.witness_point = z;
          v.witness_direction = c.witness;
        }
        v.convex = false;
      }
    }
    report.levels.push_back(v);
  }
  return report;
}

ShrinkReport support_shrink_experiment(const SurfaceFamily& family, const Sinogram& sino,
                                       const Box& region, double step, double noise_floor) {
  if (sino.metric_id != "minkowski") {
    throw InvalidArgument("shrink experiment: sinogram rays must be Minkowski lines");
  }
  const int n = sino.x_grid.ndim();
  ShrinkReport rep;
  rep.noise_floor = noise_floor;
  std::vector<double> vals;
  Vec z(n + 1);
  for (std::size_t it = 0; it < sino.num_theta(); ++it) {
    const Vec& th = sino.directions.directions[it];
    for (std::size_t ix = 0; ix < sino.num_x(); ++ix) {
      ++rep.rays_checked;
      const Vec x = sino.x_point(ix);
      // Parameter range inside the region.
      double a = region.lo[0];
      double b = region.hi[0];
      bool hit = true;
      for (int i = 0; i < n && hit; ++i) {
        const double lo = region.lo[i + 1] - x[i];
        const double hi = region.hi[i + 1] - x[i];
        if (th[i] == 0.0) {
          hit = lo <= 0.0 && hi >= 0.0;
          continue;
        }
        double s0 = lo / th[i];
        double s1 = hi / th[i];
        if (s0 > s1) std::swap(s0, s1);
        a = std::max(a, s0);
        b = std::min(b, s1);
      }
      if (!hit || b - a < 3 * step) continue;
      const auto m = static_cast<std::size_t>(std::floor((b - a) / step)) + 1;
      vals.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double s = a + static_cast<double>(k) * step;
        z[0] = s;
        z.tail(n) = x + s * th;
        vals[k] = family.smooth_at(z) ? family.eval(z, nullptr, nullptr)
                                      : std::numeric_limits<double>::quiet_NaN();
      }
      for (std::size_t k = 1; k + 1 < m; ++k) {
        if (!(vals[k - 1] > vals[k] && vals[k] <= vals[k + 1])) continue;
        // Parabola through the three samples.
        const double d2 = vals[k - 1] - 2 * vals[k] + vals[k + 1];
        const double off = d2 > 0 ? 0.5 * (vals[k - 1] - vals[k + 1]) / d2 : 0.0;
        const double fmin = vals[k] - 0.125 * (vals[k - 1] - vals[k + 1]) * (vals[k - 1] - vals[k + 1]) / std::max(d2, 1e-300);
        double sigma = family.sigma_of_level(fmin);
        bool tangent;
        if (std::isnan(sigma)) {
          // Single surface: the minimum must touch its level.
          Vec grad;
          const double s = a + (static_cast<double>(k) + off) * step;
          z[0] = s;
          z.tail(n) = x + s * th;
          family.eval(z, &grad, nullptr);
          tangent = std::abs(fmin - family.level(0.0)) < 10.0 * step * grad.norm();
          sigma = 0.0;
        } else {
          tangent = sigma >= 0.0 && sigma <= 1.0;
        }
        if (!tangent) continue;
        TangentRay ray{it, ix, a + (static_cast<double>(k) + off) * step, sigma, sino.at(it, ix)};
        rep.max_abs_tangent = std::max(rep.max_abs_tangent, std::abs(ray.value));
        if (std::abs(ray.value) >= noise_floor) rep.violating.push_back(ray);
        rep.tangent.push_back(ray);
      }
    }
  }
  return rep;
}

}  // namespace lightray
