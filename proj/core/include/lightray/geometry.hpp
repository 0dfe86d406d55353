#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightray/linalg.hpp"

namespace lightray {

// Chart point z = (t, x^1, ..., x^n).
struct SpacetimePoint {
  Vec coords;

  SpacetimePoint() = default;
  explicit SpacetimePoint(Vec c) : coords(std::move(c)) {}

  [[nodiscard]] int dim() const { return static_cast<int>(coords.size()); }
  [[nodiscard]] int spatial_dim() const { return dim() - 1; }
  [[nodiscard]] double t() const { return coords[0]; }
  [[nodiscard]] Vec x() const { return coords.tail(coords.size() - 1); }
};

struct TangentVector {
  Vec components;
};

struct Cotangent {
  Vec components;
};

enum class Causal { Spacelike, Timelike, Lightlike };

struct CausalClass {
  Causal kind;
  double q;  // g(v,v) or g^{-1}(zeta,zeta)
};

std::string_view to_string(Causal c);

// Partial derivatives of the metric coefficients, d[k](i,j) = d_k g_ij.
using MetricPartials = std::array<Mat, kMaxDim>;

// A Lorentzian metric of signature (-,+,...,+) given in closed form on a
// single chart. Implementations must be immutable and thread-safe.
class Metric {
 public:
  virtual ~Metric() = default;

  [[nodiscard]] virtual std::string id() const = 0;
  [[nodiscard]] virtual std::vector<double> params() const = 0;
  [[nodiscard]] virtual int spatial_dim() const = 0;
  [[nodiscard]] int dim() const { return spatial_dim() + 1; }

  [[nodiscard]] virtual Mat g(const Vec& z) const = 0;
  [[nodiscard]] virtual Mat g_inv(const Vec& z) const;
  virtual void partials(const Vec& z, MetricPartials& d) const = 0;
  virtual void inverse_partials(const Vec& z, MetricPartials& d) const;

  // Right-hand side of Hamilton's equations for H = 1/2 g^{ij} p_i p_j:
  // dz/ds = g^{-1} p, dp_k/ds = -1/2 d_k g^{ij} p_i p_j.
  virtual void hamiltonian_rhs(const Vec& z, const Vec& p, Vec& dz, Vec& dp) const;

  // True when the metric is Minkowski in these coordinates; enables the
  // straight-line fast path.
  [[nodiscard]] virtual bool is_flat() const { return false; }
};

using MetricPtr = std::shared_ptr<const Metric>;

// Registry. Known ids:
//   "minkowski"                      no parameters
//   "product-stretch"  [a]           -dt^2 + (1 + a x1^2) dx1^2 + dx2^2 + ...
//   "product-lens"     [amp, width]  -dt^2 + (1 + amp exp(-|x|^2/width^2)) |dx|^2
//   "perturbed"        [eps, width]  -dt^2 + (1 + eps b(t,x)) |dx|^2 with the
//                                    dipole bump b(z) = (u.z) exp(-|z|^2/width^2),
//                                    u = (1,...,1)/sqrt(n+1), so b(0) = 0.
// Missing trailing parameters take the defaults a = 1, amp = 0.3, width = 1,
// eps = 0.05.
MetricPtr make_metric(std::string_view id, int spatial_dim,
                      std::span<const double> params = {});
std::vector<std::string> metric_ids();

// Index gymnastics.
Cotangent lower(const Metric& metric, const SpacetimePoint& z, const TangentVector& v);
TangentVector raise(const Metric& metric, const SpacetimePoint& z, const Cotangent& w);

inline constexpr double kCausalTolerance = 1e-10;

CausalClass classify_vector(const Metric& metric, const SpacetimePoint& z,
                            const TangentVector& v, double tol = kCausalTolerance);
CausalClass classify_covector(const Metric& metric, const SpacetimePoint& z,
                              const Cotangent& w, double tol = kCausalTolerance);

// Number of negative eigenvalues and the condition number of g(z).
struct SignatureInfo {
  int negative = 0;
  int positive = 0;
  double condition = 0.0;
};
SignatureInfo signature(const Metric& metric, const SpacetimePoint& z);

// Levi-Civita symbols, gamma[k](i,j) = Gamma^k_ij. Throws when g(z) has
// condition number above 1e12.
using Christoffel = std::array<Mat, kMaxDim>;
Christoffel christoffel(const Metric& metric, const SpacetimePoint& z);

}  // namespace lightray
