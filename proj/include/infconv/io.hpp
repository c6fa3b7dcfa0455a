#pragma once

// File formats used by the command-line tool.
//
//   1D fields   CSV with header "x,value", one row per grid point x_j = 2 pi j / n
//   2D fields   raw little-endian float64, row-major, n*n values (lossless), plus
//               a 16-bit binary PGM (P5, maxval 65535) for viewing, with values
//               clamped to [0, 1]
//   config      flat "key = value" lines; '#' starts a comment

#include <filesystem>
#include <map>
#include <string>

#include "infconv/spectral.hpp"

namespace infconv::io {

// Fixed "%.17g" rendering, stable across runs.
std::string format_double(double x);

void write_csv_1d(const std::filesystem::path& path, const spectral::Field& field);
spectral::Field read_csv_1d(const std::filesystem::path& path);

void write_raw_2d(const std::filesystem::path& path, const spectral::Field& field);
spectral::Field read_raw_2d(const std::filesystem::path& path);

void write_pgm16(const std::filesystem::path& path, const spectral::Field& field);

// Dispatches on extension: ".csv" (1D) or ".f64" (2D).
spectral::Field read_field(const std::filesystem::path& path);
// Writes ".csv" for 1D; ".f64" plus ".pgm" for 2D. `stem` has no extension.
void write_field(const std::filesystem::path& stem, const spectral::Field& field);

void write_text(const std::filesystem::path& path, const std::string& text);

// Keys are normalized to lower case with '-' replaced by '_'. Throws Io, Usage.
std::map<std::string, std::string> read_config(const std::filesystem::path& path);
std::map<std::string, std::string> parse_config(const std::string& text);

}  // namespace infconv::io
