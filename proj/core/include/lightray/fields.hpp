#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lightray/linalg.hpp"

namespace lightray {

// Uniform grid: sample i along axis a sits at origin[a] + i * spacing[a].
struct GridSpec {
  std::vector<std::size_t> dims;
  std::vector<double> origin;
  std::vector<double> spacing;

  [[nodiscard]] int ndim() const { return static_cast<int>(dims.size()); }
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] double cell_volume() const;
  // Coordinates of the last sample along each axis.
  [[nodiscard]] std::vector<double> upper() const;
  // Throws InvalidArgument unless ranks agree, dims > 0 and spacing > 0.
  void validate() const;

  // dims[a] samples spanning [lo[a], hi[a]] inclusive.
  static GridSpec spanning(std::span<const double> lo, std::span<const double> hi,
                           std::span<const std::size_t> dims);
  // The same number of samples on every axis of the cube [lo, hi]^ndim.
  static GridSpec cube(int ndim, double lo, double hi, std::size_t samples);
};

// Row-major strides for dims, last axis contiguous.
std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& dims);

// Multilinear interpolation of row-major samples at coordinates z[0..ndim);
// zero outside the grid's bounding box.
double multilinear(const double* data, const GridSpec& grid, const std::size_t* strides,
                   const double* z);

// Real samples on a GridSpec, row-major with axis 0 (time) slowest.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid);
  ScalarField(GridSpec grid, std::vector<double> data);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] int ndim() const { return grid_.ndim(); }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] const std::vector<double>& data() const { return data_; }
  [[nodiscard]] std::vector<double>& data() { return data_; }
  [[nodiscard]] double operator[](std::size_t i) const { return data_[i]; }
  [[nodiscard]] double& operator[](std::size_t i) { return data_[i]; }

  [[nodiscard]] std::size_t stride(int axis) const { return strides_[axis]; }
  // Multi-index of flat index i.
  void unravel(std::size_t i, std::size_t* idx) const;
  // Chart coordinates of flat index i.
  [[nodiscard]] Vec point(std::size_t i) const;

  // Multilinear interpolation; zero outside the grid's bounding box.
  [[nodiscard]] double interpolate(const Vec& z) const;

  // sum f g dV over the grid.
  [[nodiscard]] double inner(const ScalarField& other) const;
  [[nodiscard]] double l2_norm() const;

 private:
  GridSpec grid_;
  std::vector<double> data_;
  std::vector<std::size_t> strides_;
};

// Support descriptor: the support lies in {|x| <= c|t| + R} with 0 < c < 1.
struct SupportCone {
  double c = 0.5;
  double R = 1.0;
  [[nodiscard]] bool contains(const Vec& z) const;
};

// Optional description of the main singularity of a phantom: the hypersurface
// {conormal . (z - point) = 0}.
struct SingularSupport {
  Vec point;
  Vec conormal;
};

class Phantom {
 public:
  virtual ~Phantom() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  [[nodiscard]] virtual std::vector<double> params() const = 0;
  [[nodiscard]] virtual int spatial_dim() const = 0;
  [[nodiscard]] virtual double operator()(const Vec& z) const = 0;
  [[nodiscard]] virtual SupportCone support() const = 0;
  // Closed spacetime box outside of which the phantom vanishes exactly.
  [[nodiscard]] virtual Box bounding_box() const = 0;
  [[nodiscard]] virtual std::optional<SingularSupport> singular_support() const {
    return std::nullopt;
  }
};

using PhantomPtr = std::shared_ptr<const Phantom>;

// Registry (defaults in brackets; trailing parameters may be omitted):
//   "zero"
//   "gaussian"         [sigma=1, z0...=0]  exp(-|z - z0|^2 / sigma^2), cut at 6 sigma
//   "ball"             [radius=1, width=0.2, z0...=0]  smoothed spacetime ball
//   "slab-spacelike"   [width=0.2, plateau=1, taper=1]  jump across x^{n-1} = 0
//   "slab-timelike"    [width=0.2, plateau=1, taper=1]  jump across t = 0
//   "expanding"        [c=0.5, R=1, width=0.2, duration=3]
//                      smoothed ball |x| < R + c(sqrt(t^2+1) - 1) - width
//   "time-oscillation" [omega=8, sigma_t=1.5, sigma_x=1, cut=6]
//                      cos(omega t) exp(-t^2/sigma_t^2 - |x|^2/sigma_x^2)
//   "wavepacket"       [k=3, sigma_t=1.5, sigma_x=1.5, cut=6]
//                      cos(k x^{n-1}) exp(-t^2/sigma_t^2 - |x|^2/sigma_x^2)
//                      The envelope is cut where its exponent exceeds cut^2.
// Ramps are the quintic smoothstep over the given width.
PhantomPtr make_phantom(std::string_view id, int spatial_dim,
                        std::span<const double> params = {});
std::vector<std::string> phantom_ids();

// Quintic smoothstep: 0 for u <= 0, 1 for u >= 1, C^2 in between.
double smoothstep(double u);

class Weight {
 public:
  virtual ~Weight() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  // kappa(z, v), homogeneous of degree zero in v. v must be nonzero.
  [[nodiscard]] virtual double operator()(const Vec& z, const Vec& v) const = 0;
  // Lower bound of |kappa| over all inputs.
  [[nodiscard]] virtual double kappa_min() const = 0;
  [[nodiscard]] virtual bool is_unit() const { return false; }
};

using WeightPtr = std::shared_ptr<const Weight>;

// "one" or "sine": 1 + sin(z^0 + z^1) v^1 / (2|v|), with v first flipped to
// be future pointing so that every nonzero multiple of v gives the same value.
WeightPtr make_weight(std::string_view id);
std::vector<std::string> weight_ids();

// Pointwise evaluation at every grid sample.
ScalarField sample(const Phantom& phantom, const GridSpec& grid);

}  // namespace lightray
