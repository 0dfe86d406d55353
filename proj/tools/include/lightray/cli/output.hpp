#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "lightray/fields.hpp"

namespace lightray::cli {

// Shortest text of v with 17 significant digits, independent of the locale.
std::string format_double(double v);

// Comma-separated rows; numbers through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(const char* text) { return cell(std::string(text)); }
  void end_row();
  void close();

 private:
  void separator();
  std::ofstream out_;
  bool row_started_ = false;
};

// 2-D image, row-major.
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

// The plane through the middle of the field spanned by axes 0 and 1
// (rows t, columns x^1); the remaining axes sit at their middle sample.
Image middle_slice(const ScalarField& field);

// Binary PGM (P5, maxval 65535, big-endian) linearly mapping [min, max] to
// [0, 65535], plus a sidecar `<path>.txt` holding min and max. Returns the
// sidecar path.
std::filesystem::path write_pgm(const std::filesystem::path& path, const Image& image);

// zlib CRC-32 of the file contents.
std::uint32_t crc32_file(const std::filesystem::path& path);

}  // namespace lightray::cli
