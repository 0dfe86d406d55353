#pragma once

#include <complex>
#include <string>

#include "lightray/fields.hpp"
#include "lightray/fourier.hpp"
#include "lightray/transform.hpp"

namespace lightray {

// Relative light-cone clamp for the singular multipliers.
inline constexpr double kLightConeClamp = 1e-3;

// Surface area of the unit sphere S^k in R^{k+1}; |S^0| = 2.
double sphere_area(int k);
// C_n = 2 pi |S^{n-2}|.
double normal_constant(int n);

struct MultiplierValue {
  double value = 0.0;
  bool clamped = false;   // |xi|^2 - tau^2 was raised to eps_lc |zeta|^2
  bool singular = false;  // xi = 0
};

// C_n (|xi|^2 - tau^2)_+^{(n-3)/2} / |xi|^{n-2}, n in {2, 3}. Zero on
// |tau| >= |xi|.
MultiplierValue multiplier_eval(int n, double tau, const Vec& xi,
                                double eps_lc = kLightConeClamp);

enum class FilterVariant {
  AbsXi,    // |xi|^{n-2}
  AbsZeta,  // |zeta|^{n-2}
};

// C_n^{-1} |xi|^{n-2} (|xi|^2 - tau^2)_+^{(3-n)/2}, the left inverse of
// multiplier_eval on the open spacelike cone.
MultiplierValue filter_eval(int n, double tau, const Vec& xi, double eps_lc = kLightConeClamp,
                            FilterVariant variant = FilterVariant::AbsXi);

// Smooth spacelike cutoff: 1 for |tau| <= (1 - eps)|xi|, 0 for
// |tau| >= (1 - eps/2)|xi|, quintic in between; 0 at xi = 0.
double spacelike_weight(double tau, const Vec& xi, double eps_band);

// F^{-1} m F on the field's grid. The caller pads (zero_pad) when a linear
// rather than cyclic convolution is wanted.
ScalarField apply_multiplier(const ScalarField& field, const FrequencyFunction& m);

// The normal-operator symbol as a FrequencyFunction (zeta = (tau, xi)).
FrequencyFunction normal_multiplier(int n, double eps_lc = kLightConeClamp);

struct FilterOptions {
  double eps_lc = kLightConeClamp;
  FilterVariant variant = FilterVariant::AbsXi;
  int pad_factor = 1;
};

// Applies the reconstruction filter to L'Lf, approximating h(box_+) f.
ScalarField reconstruct_spacelike(const ScalarField& nf, int n, const FilterOptions& opts = {});

// FFT cutoff to the spacelike band; pad_factor as in FilterOptions.
ScalarField spacelike_project(const ScalarField& field, double eps_band, int pad_factor = 1);

struct SliceCheck {
  std::complex<double> lhs;  // f^(-theta.xi, xi)
  std::complex<double> rhs;  // int exp(-i x.xi) Lf(x, theta) dx
  double abs_err = 0.0;
  double tau = 0.0;
  // Distance from tau to the nearest DFT bin of the time axis, in bins. The
  // left side is evaluated off-grid exactly, so this is informational.
  double bin_offset = 0.0;
};

// Both sides of the slice identity for direction itheta of the sinogram.
// The sinogram's x-grid must cover the shadow of the field.
SliceCheck fourier_slice_check(const ScalarField& field, const Sinogram& sino,
                               std::size_t itheta, const Vec& xi);

// Sum of squared differences along axis over the samples whose coordinates
// lie in region (both endpoints of each difference inside).
double edge_energy(const ScalarField& field, int axis, const Box& region);

struct VisibilityConfig {
  int n = 2;
  std::size_t grid_points = 96;  // per axis
  double half_extent = 3.0;      // grid is [-half_extent, half_extent]^{n+1}
  std::size_t directions = 256;
  double x_refine = 2.0;  // sinogram x spacing = grid spacing / x_refine
  double step_refine = 2.0;  // Simpson step = grid spacing / step_refine
  double edge_cells = 2.0;   // ramp width in grid cells
  double plateau = 1.0;
  double taper = 1.0;
  double eps_lc = kLightConeClamp;
  double region = 0.6;  // edge energy is measured on the cube [-region, region]
};

struct VisibilityRun {
  std::string phantom;
  double recon_energy = 0.0;
  double true_energy = 0.0;
  double ratio = 0.0;
  ScalarField truth;
  ScalarField reconstruction;
};

struct VisibilityReport {
  VisibilityRun spacelike;
  VisibilityRun timelike;
  [[nodiscard]] double ordering() const { return spacelike.ratio / timelike.ratio; }
};

// sinogram -> backproject -> reconstruct_spacelike for the two slab
// phantoms, with edge energies measured along each slab's conormal axis.
VisibilityRun visibility_run(const VisibilityConfig& cfg, bool spacelike_edge);
VisibilityReport visibility_experiment(const VisibilityConfig& cfg);

}  // namespace lightray
