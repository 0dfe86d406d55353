#pragma once

#include <cstdint>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightray/fields.hpp"
#include "lightray/geometry.hpp"
#include "lightray/transform.hpp"

namespace lightray {

// A defining function F with closed-form derivatives and a level schedule:
// the surface for parameter sigma is {F(z) = level(sigma)}, its interior
// {F < level(sigma)}.
class SurfaceFamily {
 public:
  virtual ~SurfaceFamily() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  [[nodiscard]] virtual std::vector<double> params() const = 0;
  [[nodiscard]] virtual int spatial_dim() const = 0;
  // F(z); grad and hess are filled when non-null.
  virtual double eval(const Vec& z, Vec* grad, Mat* hess) const = 0;
  [[nodiscard]] virtual double level(double /*sigma*/) const { return 0.0; }
  // sigma with level(sigma) = value, or NaN if the schedule is constant.
  [[nodiscard]] virtual double sigma_of_level(double /*value*/) const { return std::nan(""); }
  // False near points where F is not smooth.
  [[nodiscard]] virtual bool smooth_at(const Vec& /*z*/) const { return true; }

  [[nodiscard]] double value(const Vec& z, double sigma = 0.0) const {
    return eval(z, nullptr, nullptr) - level(sigma);
  }
};

using SurfacePtr = std::shared_ptr<const SurfaceFamily>;

// Registry (defaults in brackets):
//   "cylinder"    [R=1]                 |x| - R
//   "double-cone" [c=0.5, t_min=0.1]    |x| - c|t|, smooth for |t| > t_min, x != 0
//   "hyperboloid" [c=0.5, C=1]          |x|^2 - c^2 t^2 - C
//   "plane"       [axis=n-1, offset=0]  z^axis - offset
//   "quadric"     [c_tilde=0.7, a_min=0.5, a_max=3, t0=0, x0...=0]
//                 |x - x0|^2 - c_tilde^2 (t - t0)^2 at level
//                 a_max - sigma (a_max - a_min)
SurfacePtr make_surface(std::string_view id, int spatial_dim,
                        std::span<const double> params = {});
std::vector<std::string> surface_ids();

// (nabla^2 F)_ij = d_i d_j F - Gamma^k_ij d_k F.
Mat covariant_hessian(const Metric& metric, const SurfaceFamily& surface, const Vec& z);

// The level set through z is timelike: dF(z) is a spacelike covector.
// Throws when dF(z) = 0.
bool is_timelike_surface(const Metric& metric, const SurfaceFamily& surface, const Vec& z);

enum class SignConvention {
  InteriorNegative,  // Q(v) = nabla^2 F(v, v), interior {F < 0}
  InteriorPositive,  // Q(v) = -nabla^2 F(v, v), interior {F > 0}
};

// Euclidean-unit lightlike vectors tangent to the level set through z: two
// for n = 2, `samples` points of a circle for n = 3. Throws when there are
// none (spacelike level set) or dF(z) = 0.
std::vector<Vec> lightlike_tangents(const Metric& metric, const SurfaceFamily& surface,
                                    const Vec& z, std::size_t samples = 64);

struct ConvexityOptions {
  SignConvention convention = SignConvention::InteriorNegative;
  double tol_conv = 1e-8;  // scaled by max(1, |dF|)
  std::size_t samples = 10000;
};

struct ConvexityResult {
  double min_value = 0.0;
  bool strict = false;
  Vec witness;  // direction attaining min_value
};

// Minimum of Q over Euclidean-unit lightlike tangents at z.
ConvexityResult strict_convexity_check(const Metric& metric, const SurfaceFamily& surface,
                                       const Vec& z, const ConvexityOptions& opts = {});

struct EscapeOptions {
  double step = 1e-3;
  std::size_t directions = 16;  // tangents tried for n = 3
  double exclusion_steps = 10;  // |s| below this many steps is the tangency itself
};

struct EscapeResult {
  bool escapes = true;
  double min_value = 0.0;  // min of F o gamma - level away from s = 0
  Vec witness;
};

// Traces every lightlike tangent geodesic through z (on the level sigma) while
// it stays in box and checks that F o gamma stays strictly on one side.
EscapeResult tangent_escape_check(const Metric& metric, const SurfaceFamily& surface,
                                  const Vec& z, const Box& box, double sigma = 0.0,
                                  const EscapeOptions& opts = {});

struct ScanOptions {
  std::size_t points_per_level = 200;
  std::uint64_t seed = 1;
  // Box in which candidate points are drawn before being projected onto a
  // level set and filtered by the support box. Defaults to the support box;
  // keeping it fixed makes verdicts monotone under support shrinkage.
  std::optional<Box> sampling_box;
  ConvexityOptions convexity{SignConvention::InteriorNegative, 1e-8, 2000};
  double grad_tol = 1e-10;
  std::size_t cone_samples = 20000;
};

struct LevelVerdict {
  double sigma = 0.0;
  std::size_t points = 0;
  bool nondegenerate = true;  // (ii)
  bool timelike = true;       // (iii), first half
  bool convex = true;         // (iii), second half
  double min_q = 0.0;
  Vec witness_point;
  Vec witness_direction;
  [[nodiscard]] bool pass() const { return nondegenerate && timelike && convex; }
};

struct FoliationReport {
  bool disjoint = true;  // (i)
  Vec disjoint_witness;
  std::vector<LevelVerdict> levels;
  [[nodiscard]] bool pass() const;
};

// Conditions (i)-(iii) for the family against a phantom support descriptor,
// restricted to the support box.
FoliationReport foliation_scan(const Metric& metric, const SurfaceFamily& family,
                               std::span<const double> sigma_grid, const Box& support_box,
                               const SupportCone& cone, const ScanOptions& opts = {});

struct TangentRay {
  std::size_t theta_index = 0;
  std::size_t x_index = 0;
  double s = 0.0;      // parameter of tangency
  double sigma = 0.0;  // level touched
  double value = 0.0;  // sinogram value
};

struct ShrinkReport {
  std::size_t rays_checked = 0;
  std::vector<TangentRay> tangent;    // all tangent rays found
  std::vector<TangentRay> violating;  // tangent rays with |value| above the floor
  double max_abs_tangent = 0.0;
  double noise_floor = 1e-10;
  [[nodiscard]] bool consistent() const { return violating.empty(); }
};

// Finds sinogram rays (Minkowski lines) whose F o gamma has an interior
// local minimum inside region at a level with sigma in [0, 1], and reports
// those carrying |value| above noise_floor.
ShrinkReport support_shrink_experiment(const SurfaceFamily& family, const Sinogram& sino,
                                       const Box& region, double step = 1e-2,
                                       double noise_floor = 1e-10);

}  // namespace lightray
