#include "lightray/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lightray/error.hpp"
#include "lightray/parallel.hpp"

namespace lightray {

std::size_t GridSpec::size() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

double GridSpec::cell_volume() const {
  return std::accumulate(spacing.begin(), spacing.end(), 1.0, std::multiplies<>());
}

std::vector<double> GridSpec::upper() const {
  std::vector<double> hi(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    hi[a] = origin[a] + static_cast<double>(dims[a] - 1) * spacing[a];
  }
  return hi;
}

void GridSpec::validate() const {
  if (dims.empty() || dims.size() != origin.size() || dims.size() != spacing.size()) {
    throw InvalidArgument("grid: dims, origin and spacing must have the same rank");
  }
  if (static_cast<int>(dims.size()) > kMaxDim) throw InvalidArgument("grid: rank too large");
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (dims[a] == 0) throw InvalidArgument("grid: empty axis " + std::to_string(a));
    if (!(spacing[a] > 0) || !std::isfinite(spacing[a])) {
      throw InvalidArgument("grid: spacing must be positive on axis " + std::to_string(a));
    }
    if (!std::isfinite(origin[a])) throw InvalidArgument("grid: non-finite origin");
  }
}

GridSpec GridSpec::spanning(std::span<const double> lo, std::span<const double> hi,
                            std::span<const std::size_t> dims) {
  if (lo.size() != hi.size() || lo.size() != dims.size()) {
    throw InvalidArgument("grid: rank mismatch");
  }
  GridSpec g;
  g.dims.assign(dims.begin(), dims.end());
  g.origin.assign(lo.begin(), lo.end());
  g.spacing.resize(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    g.spacing[a] = dims[a] > 1 ? (hi[a] - lo[a]) / static_cast<double>(dims[a] - 1) : 1.0;
  }
  g.validate();
  return g;
}

GridSpec GridSpec::cube(int ndim, double lo, double hi, std::size_t samples) {
  const std::vector<double> l(ndim, lo), h(ndim, hi);
  const std::vector<std::size_t> d(ndim, samples);
  return spanning(l, h, d);
}

std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (int a = static_cast<int>(dims.size()) - 2; a >= 0; --a) {
    strides[a] = strides[a + 1] * dims[a + 1];
  }
  return strides;
}

double multilinear(const double* data, const GridSpec& grid, const std::size_t* strides,
                   const double* z) {
  const int d = grid.ndim();
  std::size_t offset = 0;
  double frac[kMaxDim];
  for (int a = 0; a < d; ++a) {
    const double u = (z[a] - grid.origin[a]) / grid.spacing[a];
    const auto last = static_cast<double>(grid.dims[a] - 1);
    if (!(u >= 0.0 && u <= last)) return 0.0;
    if (grid.dims[a] == 1) {
      frac[a] = 0.0;
      continue;
    }
    double fl = std::floor(u);
    if (fl >= last) fl = last - 1.0;
    offset += static_cast<std::size_t>(fl) * strides[a];
    frac[a] = u - fl;
  }
  double acc = 0.0;
  const unsigned corners = 1u << d;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t off = offset;
    for (int a = 0; a < d && w != 0.0; ++a) {
      if (c & (1u << a)) {
        w *= frac[a];
        off += strides[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) acc += w * data[off];
  }
  return acc;
}

ScalarField::ScalarField(GridSpec grid) : ScalarField(grid, std::vector<double>(grid.size())) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> data)
    : grid_(std::move(grid)), data_(std::move(data)) {
  grid_.validate();
  if (data_.size() != grid_.size()) throw InvalidArgument("field: data length mismatch");
  strides_ = row_major_strides(grid_.dims);
}

void ScalarField::unravel(std::size_t i, std::size_t* idx) const {
  for (int a = 0; a < ndim(); ++a) {
    idx[a] = i / strides_[a];
    i %= strides_[a];
  }
}

Vec ScalarField::point(std::size_t i) const {
  std::size_t idx[kMaxDim];
  unravel(i, idx);
  Vec z(ndim());
  for (int a = 0; a < ndim(); ++a) {
    z[a] = grid_.origin[a] + static_cast<double>(idx[a]) * grid_.spacing[a];
  }
  return z;
}

double ScalarField::interpolate(const Vec& z) const {
  return multilinear(data_.data(), grid_, strides_.data(), z.data());
}

double ScalarField::inner(const ScalarField& other) const {
  if (other.size() != size()) throw InvalidArgument("inner: grid mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) acc += data_[i] * other.data_[i];
  return acc * grid_.cell_volume();
}

double ScalarField::l2_norm() const { return std::sqrt(inner(*this)); }

bool SupportCone::contains(const Vec& z) const {
  return z.tail(z.size() - 1).norm() <= c * std::abs(z[0]) + R;
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

namespace {

class UnitWeight : public Weight {
 public:
  [[nodiscard]] std::string id() const override { return "one"; }
  [[nodiscard]] double operator()(const Vec&, const Vec&) const override { return 1.0; }
  [[nodiscard]] double kappa_min() const override { return 1.0; }
  [[nodiscard]] bool is_unit() const override { return true; }
};

class SineWeight : public Weight {
 public:
  [[nodiscard]] std::string id() const override { return "sine"; }
  [[nodiscard]] double operator()(const Vec& z, const Vec& v) const override {
    const double norm = v.norm();
    if (norm == 0.0) throw InvalidArgument("weight: zero velocity");
    double sign = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) {
        sign = v[i] > 0 ? 1.0 : -1.0;
        break;
      }
    }
    return 1.0 + 0.5 * std::sin(z[0] + z[1]) * (sign * v[1] / norm);
  }
  [[nodiscard]] double kappa_min() const override { return 0.5; }
};

}  // namespace

WeightPtr make_weight(std::string_view id) {
  if (id == "one") return std::make_shared<UnitWeight>();
  if (id == "sine") return std::make_shared<SineWeight>();
  throw InvalidArgument("unknown weight '" + std::string(id) + "'");
}

std::vector<std::string> weight_ids() { return {"one", "sine"}; }

ScalarField sample(const Phantom& phantom, const GridSpec& grid) {
  if (grid.ndim() != phantom.spatial_dim() + 1) {
    throw InvalidArgument("sample: grid rank does not match the phantom dimension");
  }
  ScalarField out(grid);
  const std::size_t inner = grid.dims.back();
  const std::size_t rows = out.size() / inner;
  parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Vec z = out.point(r * inner);
      for (std::size_t k = 0; k < inner; ++k) {
        z[grid.ndim() - 1] = grid.origin.back() + static_cast<double>(k) * grid.spacing.back();
        out[r * inner + k] = phantom(z);
      }
    }
  });
  return out;
}

}  // namespace lightray
