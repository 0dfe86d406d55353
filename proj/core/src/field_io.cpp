#include "lightray/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lightray/error.hpp"

namespace lightray {
namespace {

constexpr std::array<char, 4> kMagic{'L', 'R', 'T', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error("LRTF: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& field) {
  const GridSpec& g = field.grid();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(g.ndim()));
  for (int a = 0; a < g.ndim(); ++a) {
    put<std::uint64_t>(out, g.dims[a]);
    put<double>(out, g.origin[a]);
    put<double>(out, g.spacing[a]);
  }
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(field.data().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
  } else {
    for (double v : field.data()) put<double>(out, v);
  }
  if (!out) throw Error("LRTF: write failed");
}

ScalarField read_field(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error("LRTF: bad magic");
  }
  if (get<std::uint32_t>(in) != kVersion) throw Error("LRTF: unsupported version");
  const int ndim = get<std::uint8_t>(in);
  if (ndim == 0 || ndim > kMaxDim) throw Error("LRTF: bad rank");
  GridSpec g;
  for (int a = 0; a < ndim; ++a) {
    g.dims.push_back(static_cast<std::size_t>(get<std::uint64_t>(in)));
    g.origin.push_back(get<double>(in));
    g.spacing.push_back(get<double>(in));
  }
  g.validate();
  std::vector<double> data(g.size());
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double)))) {
      throw Error("LRTF: truncated data");
    }
  } else {
    for (double& v : data) v = get<double>(in);
  }
  return ScalarField(std::move(g), std::move(data));
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_field(out, field);
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_field(in);
}

}  // namespace lightray
