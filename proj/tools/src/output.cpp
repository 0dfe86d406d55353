#include "lightray/cli/output.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

#include "lightray/error.hpp"

namespace lightray::cli {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("cannot format number");
  return {buf, end};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  out_ << std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& text) {
  separator();
  out_ << text;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("error while writing CSV");
}

Image middle_slice(const ScalarField& field) {
  const GridSpec& g = field.grid();
  if (g.ndim() < 2) throw InvalidArgument("middle_slice: need at least two axes");
  Image img;
  img.rows = g.dims[0];
  img.cols = g.dims[1];
  img.values.resize(img.rows * img.cols);
  std::size_t base = 0;
  for (int a = 2; a < g.ndim(); ++a) base += (g.dims[a] / 2) * field.stride(a);
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      img.values[r * img.cols + c] = field[base + r * field.stride(0) + c * field.stride(1)];
    }
  }
  return img;
}

std::filesystem::path write_pgm(const std::filesystem::path& path, const Image& image) {
  if (image.values.size() != image.rows * image.cols || image.values.empty()) {
    throw InvalidArgument("write_pgm: empty or inconsistent image");
  }
  const auto [lo_it, hi_it] = std::minmax_element(image.values.begin(), image.values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << image.cols << ' ' << image.rows << "\n65535\n";
  std::vector<unsigned char> bytes(2 * image.values.size());
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    const double u = hi > lo ? (image.values[i] - lo) / (hi - lo) : 0.0;
    const auto level = static_cast<unsigned>(std::lround(std::clamp(u, 0.0, 1.0) * 65535.0));
    bytes[2 * i] = static_cast<unsigned char>(level >> 8);
    bytes[2 * i + 1] = static_cast<unsigned char>(level & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("error while writing " + path.string());

  std::filesystem::path sidecar = path;
  sidecar += ".txt";
  std::ofstream side(sidecar, std::ios::binary);
  side << "min = " << format_double(lo) << "\nmax = " << format_double(hi) << '\n';
  if (!side) throw Error("cannot write " + sidecar.string());
  return sidecar;
}

std::uint32_t crc32_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace lightray::cli
