#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lightray/fields.hpp"

namespace lightray {

// Angular frequency of DFT bin k on an axis with count samples at spacing h:
// 2 pi k / (count h), wrapped to the symmetric range.
double bin_frequency(std::size_t k, std::size_t count, double h);

// Half-spectrum of a real field (last axis holds dims.back() / 2 + 1 bins),
// unnormalised: F_k = sum_j f_j exp(-2 pi i j.k / N).
struct HalfSpectrum {
  std::vector<std::size_t> dims;  // real-space dims
  std::vector<std::complex<double>> data;
  [[nodiscard]] std::size_t last_bins() const { return dims.back() / 2 + 1; }
};

HalfSpectrum rfft(const ScalarField& field);
// Inverse of rfft including the 1/N normalisation.
ScalarField irfft(HalfSpectrum spec, const GridSpec& grid);

// Full complex DFT in place, forward (sign -1) or backward (sign +1),
// unnormalised.
void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& dims,
                 int sign);

// Even real multiplier m(zeta) on the grid's angular frequencies, where
// zeta = (tau, xi) follows the axis order of the grid.
using FrequencyFunction = std::function<double(const Vec& zeta)>;

// Calls visit(flat half-spectrum index, zeta) for every bin of the half
// spectrum of a field on grid.
void for_each_frequency(const GridSpec& grid,
                        const std::function<void(std::size_t, const Vec&)>& visit);

// F^{-1} m F f through the real transforms; no padding is applied here.
ScalarField apply_frequency_multiplier(const ScalarField& field, const FrequencyFunction& m);

// Same product through the full complex transform; returns the largest
// imaginary part of the result relative to the largest real part.
double multiplier_imaginary_residue(const ScalarField& field, const FrequencyFunction& m);

// Zero-extends the field by `factor` per axis, keeping the original samples
// in the leading block so that coordinates are unchanged.
ScalarField zero_pad(const ScalarField& field, int factor);
// The leading block of a padded field on the given grid.
ScalarField crop(const ScalarField& padded, const GridSpec& grid);

// Direct evaluation of the continuous transform by the rectangle rule,
// sum_j f(z_j) exp(-i z_j . zeta) dV, at an arbitrary frequency.
std::complex<double> dtft(const ScalarField& field, const Vec& zeta);

}  // namespace lightray
