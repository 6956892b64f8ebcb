// io.hpp - small file helpers shared by the pipeline stages.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace topicci {

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Fixed-point with `digits` fractional digits ("-0.000" normalized to "0.000").
std::string format_fixed(double value, int digits);

}  // namespace topicci
