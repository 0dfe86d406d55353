#pragma once

#include <vector>

#include "lightray/fields.hpp"
#include "lightray/geodesic.hpp"
#include "lightray/geometry.hpp"
#include "lightray/theta_family.hpp"
#include "lightray/transform.hpp"

namespace lightray {

inline constexpr double kQMax = 0.7853981633974483;  // pi / 4

// zeta(q, xi) = (-theta(q).xi, xi).
Vec zeta_of(double q, const Vec& xi);

// The plane swept by the rays s -> (s, x + s theta(q)) through the spatial
// hyperplane {x . xi = p}; equivalently {z : z . zeta(q, xi) = p}.
struct TimelikePlane {
  double p = 0.0;
  Vec xi;
  double q = 0.0;

  [[nodiscard]] int spatial_dim() const { return static_cast<int>(xi.size()); }
  [[nodiscard]] Vec theta() const { return ThetaFamily{spatial_dim()}(q); }
  [[nodiscard]] Vec zeta() const { return zeta_of(q, xi); }
  // |z . zeta - p| <= tol.
  [[nodiscard]] bool contains(const Vec& z, double tol = 1e-12) const;
  // Membership through the ray picture: the ray through z meets t = 0 on
  // the base hyperplane.
  [[nodiscard]] bool contains_by_rays(const Vec& z, double tol = 1e-12) const;
  // Point p xi / |xi|^2 of the base hyperplane and an orthonormal basis of
  // xi-perp (n - 1 columns).
  [[nodiscard]] Vec base_point() const;
  [[nodiscard]] Mat base_frame() const;
};

// Throws unless xi != 0 and the plane is timelike (|theta(q).xi| < |xi|).
TimelikePlane plane_from_rays(double p, const Vec& xi, double q);

struct SolveQOptions {
  double neighborhood = 0.3;  // |zeta/|zeta| - e^{n-1}| bound
  double q_max = kQMax;
};

// Root q nearest 0 of zeta_n cos q + zeta_{n-1} sin q = -zeta_0.
double solve_q(const Vec& zeta, const SolveQOptions& opts = {});
// |zeta_n cos q + zeta_{n-1} sin q + zeta_0|.
double solve_q_residual(const Vec& zeta, double q);

// Jacobian of (q, xi) -> zeta(q, xi), columns (d/dq, d/dxi_1, ...).
Mat diffeo_jacobian_matrix(double q, const Vec& xi);
// Its determinant, -theta'(q) . xi.
double diffeo_jacobian(double q, const Vec& xi);

struct RadonResult {
  double value = 0.0;
  std::size_t theta_index = 0;
  double theta_mismatch = 0.0;  // |theta_grid - theta(q)|
};

// Integral of L_kappa f(x, theta(q)) over the base hyperplane {x . xi = p}
// in Euclidean surface measure, using the sinogram direction nearest to
// theta(q). Simpson over the hyperplane with step x_spacing / refine.
RadonResult radon_via_fubini(const Sinogram& sino, const TimelikePlane& plane,
                             double refine = 2.0);

// Independent oracle: int int kappa f(t, x + t theta(q)) dt dS(x) over the
// base hyperplane, Gauss-Legendre in every variable over the support box.
double plane_integral(const Phantom& f, const Weight& kappa, const TimelikePlane& plane,
                      int nodes_per_unit = 24);

// phi(z, zeta) = x#(z, theta(zeta_0)) . zeta'.
double phase(const Metric& metric, const SpacetimePoint& z, const Vec& zeta,
             const InvertOptions& opts = {});

struct PhaseHessian {
  Mat mixed;  // d^2 phi / dz_i dzeta_j at (0, e^{n-1})
  double det = 0.0;
};

// Central mixed differences with step h, one Richardson extrapolation.
PhaseHessian phase_det_check(const Metric& metric, double h = 1e-4);

// Largest |d phi / d zeta_k - z^k| over k = 1..n at (z, e^{n-1}) with z on
// t = 0, central differences in zeta with step h.
double phase_slice_derivative_error(const Metric& metric, const Vec& x, double h = 1e-4);

}  // namespace lightray
