#include "lightray/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include "lightray/error.hpp"
#include "lightray/parallel.hpp"

namespace lightray {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<int> as_int(const std::vector<std::size_t>& dims) {
  std::vector<int> out;
  for (auto d : dims) {
    if (d > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
      throw InvalidArgument("fft: axis too long");
    }
    out.push_back(static_cast<int>(d));
  }
  return out;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(std::max<std::size_t>(bytes, 16))) {
    if (!ptr) throw NumericalFailure("fft: out of memory");
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (!p_) throw NumericalFailure("fft: planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void run() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

}  // namespace

double bin_frequency(std::size_t k, std::size_t count, double h) {
  const auto kk = static_cast<double>(k);
  const auto n = static_cast<double>(count);
  const double signed_k = 2 * k < count ? kk : kk - n;
  return 2.0 * std::numbers::pi * signed_k / (n * h);
}

HalfSpectrum rfft(const ScalarField& field) {
  const auto& dims = field.grid().dims;
  const auto nd = as_int(dims);
  HalfSpectrum out;
  out.dims = dims;
  out.data.resize(product(dims) / dims.back() * out.last_bins());
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    // FFTW_ESTIMATE never touches the arrays while planning, and an
    // out-of-place r2c transform preserves its input.
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c(
        static_cast<int>(nd.size()), nd.data(), const_cast<double*>(field.data().data()),
        reinterpret_cast<fftw_complex*>(out.data.data()), FFTW_ESTIMATE));
  }
  plan->run();
  return out;
}

ScalarField irfft(HalfSpectrum spec, const GridSpec& grid) {
  if (grid.dims != spec.dims) throw InvalidArgument("irfft: grid mismatch");
  const auto nd = as_int(grid.dims);
  const std::size_t total = product(grid.dims);
  std::vector<double> data(total);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    // c2r overwrites its input; spec is a private copy.
    plan = std::make_unique<Plan>(fftw_plan_dft_c2r(
        static_cast<int>(nd.size()), nd.data(), reinterpret_cast<fftw_complex*>(spec.data.data()),
        data.data(), FFTW_ESTIMATE));
  }
  plan->run();
  const double scale = 1.0 / static_cast<double>(total);
  for (double& v : data) v *= scale;
  return ScalarField(grid, std::move(data));
}

void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& dims,
                 int sign) {
  if (data.size() != product(dims)) throw InvalidArgument("fft: size mismatch");
  const auto nd = as_int(dims);
  FftwBuffer buf(data.size() * sizeof(fftw_complex));
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    auto* p = static_cast<fftw_complex*>(buf.ptr);
    plan = std::make_unique<Plan>(fftw_plan_dft(static_cast<int>(nd.size()), nd.data(), p, p,
                                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                                FFTW_ESTIMATE));
  }
  auto* c = static_cast<std::complex<double>*>(buf.ptr);
  std::copy(data.begin(), data.end(), c);
  plan->run();
  std::copy(c, c + data.size(), data.begin());
}

void for_each_frequency(const GridSpec& grid,
                        const std::function<void(std::size_t, const Vec&)>& visit) {
  const int d = grid.ndim();
  std::vector<std::size_t> hdims = grid.dims;
  hdims.back() = grid.dims.back() / 2 + 1;
  const std::size_t total = product(hdims);
  const auto strides = row_major_strides(hdims);
  // Precomputed axis frequencies.
  std::vector<std::vector<double>> freq(d);
  for (int a = 0; a < d; ++a) {
    for (std::size_t k = 0; k < hdims[a]; ++k) {
      freq[a].push_back(bin_frequency(k, grid.dims[a], grid.spacing[a]));
    }
  }
  Vec zeta(d);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t r = i;
    for (int a = 0; a < d; ++a) {
      zeta[a] = freq[a][r / strides[a]];
      r %= strides[a];
    }
    visit(i, zeta);
  }
}

ScalarField apply_frequency_multiplier(const ScalarField& field, const FrequencyFunction& m) {
  HalfSpectrum spec = rfft(field);
  for_each_frequency(field.grid(), [&](std::size_t i, const Vec& zeta) { spec.data[i] *= m(zeta); });
  return irfft(std::move(spec), field.grid());
}

double multiplier_imaginary_residue(const ScalarField& field, const FrequencyFunction& m) {
  const GridSpec& g = field.grid();
  std::vector<std::complex<double>> data(field.data().begin(), field.data().end());
  fft_inplace(data, g.dims, -1);
  const int d = g.ndim();
  const auto strides = row_major_strides(g.dims);
  Vec zeta(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t r = i;
    for (int a = 0; a < d; ++a) {
      zeta[a] = bin_frequency(r / strides[a], g.dims[a], g.spacing[a]);
      r %= strides[a];
    }
    data[i] *= m(zeta);
  }
  fft_inplace(data, g.dims, +1);
  double max_re = 0.0;
  double max_im = 0.0;
  for (const auto& c : data) {
    max_re = std::max(max_re, std::abs(c.real()));
    max_im = std::max(max_im, std::abs(c.imag()));
  }
  return max_re > 0 ? max_im / max_re : max_im;
}

ScalarField zero_pad(const ScalarField& field, int factor) {
  if (factor < 1) throw InvalidArgument("zero_pad: factor must be at least 1");
  GridSpec g = field.grid();
  for (auto& d : g.dims) d *= static_cast<std::size_t>(factor);
  ScalarField out(g);
  const int nd = g.ndim();
  std::size_t idx[kMaxDim];
  for (std::size_t i = 0; i < field.size(); ++i) {
    field.unravel(i, idx);
    std::size_t off = 0;
    for (int a = 0; a < nd; ++a) off += idx[a] * out.stride(a);
    out[off] = field[i];
  }
  return out;
}

ScalarField crop(const ScalarField& padded, const GridSpec& grid) {
  ScalarField out(grid);
  const int nd = grid.ndim();
  std::size_t idx[kMaxDim];
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.unravel(i, idx);
    std::size_t off = 0;
    for (int a = 0; a < nd; ++a) off += idx[a] * padded.stride(a);
    out[i] = padded[off];
  }
  return out;
}

std::complex<double> dtft(const ScalarField& field, const Vec& zeta) {
  const GridSpec& g = field.grid();
  const int d = g.ndim();
  // Separable phase factors per axis.
  std::vector<std::vector<std::complex<double>>> phase(d);
  for (int a = 0; a < d; ++a) {
    for (std::size_t k = 0; k < g.dims[a]; ++k) {
      const double z = g.origin[a] + static_cast<double>(k) * g.spacing[a];
      phase[a].push_back(std::polar(1.0, -z * zeta[a]));
    }
  }
  const std::size_t inner = g.dims.back();
  const std::size_t rows = field.size() / inner;
  std::complex<double> acc = 0.0;
  std::size_t idx[kMaxDim];
  for (std::size_t r = 0; r < rows; ++r) {
    field.unravel(r * inner, idx);
    std::complex<double> outer = 1.0;
    for (int a = 0; a < d - 1; ++a) outer *= phase[a][idx[a]];
    std::complex<double> row = 0.0;
    const double* f = field.data().data() + r * inner;
    for (std::size_t k = 0; k < inner; ++k) row += f[k] * phase[d - 1][k];
    acc += outer * row;
  }
  return acc * g.cell_volume();
}

}  // namespace lightray
