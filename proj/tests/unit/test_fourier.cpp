#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lightray/fourier.hpp"

using namespace lightray;
using cd = std::complex<double>;

namespace {

ScalarField random_field(std::mt19937_64& rng, const GridSpec& g) {
  ScalarField f(g);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : f.data()) v = u(rng);
  return f;
}

GridSpec odd_grid() {
  GridSpec g = GridSpec::cube(3, -1.0, 1.0, 8);
  g.dims = {6, 9, 7};
  return g;
}

}  // namespace

TEST_CASE("bin frequencies") {
  CHECK(bin_frequency(0, 8, 0.5) == 0.0);
  CHECK(bin_frequency(1, 8, 0.5) == doctest::Approx(2 * std::numbers::pi / 4));
  CHECK(bin_frequency(4, 8, 0.5) == doctest::Approx(-std::numbers::pi / 0.5));
  CHECK(bin_frequency(7, 8, 0.5) == doctest::Approx(-2 * std::numbers::pi / 4));
  CHECK(bin_frequency(4, 9, 1.0) == doctest::Approx(2 * std::numbers::pi * 4 / 9));
}

TEST_CASE("real transforms") {
  std::mt19937_64 rng(1);
  const ScalarField f = random_field(rng, odd_grid());
  SUBCASE("round trip") {
    const ScalarField back = irfft(rfft(f), f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-13);
  }
  SUBCASE("parseval") {
    const HalfSpectrum s = rfft(f);
    const std::size_t nb = s.last_bins();
    const std::size_t last = f.grid().dims.back();
    double spec = 0;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      const std::size_t k = i % nb;
      // Bins other than 0 and the Nyquist bin stand for a conjugate pair.
      const double mult = (k == 0 || 2 * k == last) ? 1.0 : 2.0;
      spec += mult * std::norm(s.data[i]);
    }
    double real = 0;
    for (double v : f.data()) real += v * v;
    CHECK(std::abs(spec / static_cast<double>(f.size()) - real) <= 1e-10 * real);
  }
  SUBCASE("agrees with the complex transform and the direct sum") {
    const HalfSpectrum s = rfft(f);
    std::vector<cd> full(f.data().begin(), f.data().end());
    fft_inplace(full, f.grid().dims, -1);
    const auto& d = f.grid().dims;
    const std::size_t nb = s.last_bins();
    for (std::size_t i0 = 0; i0 < d[0]; ++i0) {
      for (std::size_t i1 = 0; i1 < d[1]; ++i1) {
        for (std::size_t k = 0; k < nb; ++k) {
          const cd a = s.data[(i0 * d[1] + i1) * nb + k];
          const cd b = full[(i0 * d[1] + i1) * d[2] + k];
          CHECK(std::abs(a - b) < 1e-12);
        }
      }
    }
    // Bin (1, 2, 3) against dtft with the origin phase restored.
    const GridSpec& g = f.grid();
    Vec zeta(3);
    zeta << bin_frequency(1, d[0], g.spacing[0]), bin_frequency(2, d[1], g.spacing[1]),
        bin_frequency(3, d[2], g.spacing[2]);
    const cd direct = dtft(f, zeta);
    double phase = 0;
    for (int a = 0; a < 3; ++a) phase += g.origin[a] * zeta[a];
    const cd via = s.data[(1 * d[1] + 2) * nb + 3] * g.cell_volume() * std::polar(1.0, -phase);
    CHECK(std::abs(direct - via) < 1e-12);
  }
}

TEST_CASE("dtft of a gaussian") {
  const double sigma = 0.5;
  const GridSpec g = GridSpec::cube(3, -4, 4, 81);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::exp(-f.point(i).squaredNorm() / (sigma * sigma));
  }
  for (double k : {0.0, 1.0, 3.0}) {
    Vec zeta(3);
    zeta << 0.3 * k, -0.5 * k, 0.8 * k;
    const double ref = std::pow(std::sqrt(std::numbers::pi) * sigma, 3) *
                       std::exp(-sigma * sigma * zeta.squaredNorm() / 4);
    const cd got = dtft(f, zeta);
    CHECK(std::abs(got - ref) < 1e-10);
  }
}

TEST_CASE("multipliers") {
  std::mt19937_64 rng(2);
  const ScalarField f = random_field(rng, odd_grid());
  SUBCASE("identity") {
    const ScalarField g = apply_frequency_multiplier(f, [](const Vec&) { return 1.0; });
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(g[i] - f[i]) < 1e-10);
  }
  SUBCASE("even multipliers keep real fields real") {
    auto m = [](const Vec& z) { return std::exp(-z.squaredNorm()) + std::abs(z[0]); };
    CHECK(multiplier_imaginary_residue(f, m) < 1e-12);
  }
  SUBCASE("visits every half-spectrum bin once") {
    std::vector<int> seen(rfft(f).data.size(), 0);
    for_each_frequency(f.grid(), [&](std::size_t i, const Vec&) { ++seen[i]; });
    for (int v : seen) CHECK(v == 1);
  }
}

TEST_CASE("padding") {
  std::mt19937_64 rng(3);
  const ScalarField f = random_field(rng, odd_grid());
  const ScalarField p = zero_pad(f, 2);
  CHECK(p.grid().dims == std::vector<std::size_t>{12, 18, 14});
  CHECK(p.grid().origin == f.grid().origin);
  const ScalarField c = crop(p, f.grid());
  CHECK(c.data() == f.data());
  double extra = 0;
  for (double v : p.data()) extra += v * v;
  for (double v : f.data()) extra -= v * v;
  CHECK(std::abs(extra) < 1e-12);
}
