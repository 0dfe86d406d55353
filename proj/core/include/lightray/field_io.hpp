#pragma once

#include <filesystem>
#include <iosfwd>

#include "lightray/fields.hpp"

namespace lightray {

// LRTF binary layout, little-endian:
//   "LRTF" | u32 version = 1 | u8 ndim | ndim x (u64 dim, f64 origin, f64 spacing) | f64 data
void write_field(std::ostream& out, const ScalarField& field);
ScalarField read_field(std::istream& in);

void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace lightray
