#include "infconv/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "infconv/error.hpp"

namespace infconv::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    c = char(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return key;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_1d(const std::filesystem::path& path, const spectral::Field& field) {
  if (field.grid.q != 1) throw Error(ErrorCode::Usage, "CSV output holds 1D fields only");
  auto out = open_out(path, false);
  out << "x,value\n";
  const double h = field.grid.spacing();
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    out << format_double(double(j) * h) << ',' << format_double(field.values[j]) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

spectral::Field read_csv_1d(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1 && !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' || line[0] == '.')) continue;
    const auto comma = line.find(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  if (values.empty()) throw Error(ErrorCode::Usage, "'" + path.string() + "' holds no samples");
  spectral::Field f{spectral::Grid::make(1, int(values.size())), std::move(values)};
  f.validate();
  return f;
}

void write_raw_2d(const std::filesystem::path& path, const spectral::Field& field) {
  if (field.grid.q != 2) throw Error(ErrorCode::Usage, "raw output holds 2D fields only");
  auto out = open_out(path, true);
  for (double v : field.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

spectral::Field read_raw_2d(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) throw Error(ErrorCode::Usage, "'" + path.string() + "' holds no samples");
  if (bytes.size() % 8 != 0) throw Error(ErrorCode::Io, "'" + path.string() + "' is not a float64 array");
  const std::size_t count = bytes.size() / 8;
  const auto n = std::size_t(std::llround(std::sqrt(double(count))));
  if (n * n != count) throw Error(ErrorCode::Io, "'" + path.string() + "' does not hold a square image");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t(bytes[8 * i + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  spectral::Field f{spectral::Grid::make(2, int(n)), std::move(values)};
  f.validate();
  return f;
}

void write_pgm16(const std::filesystem::path& path, const spectral::Field& field) {
  if (field.grid.q != 2) throw Error(ErrorCode::Usage, "PGM output holds 2D fields only");
  auto out = open_out(path, true);
  out << "P5\n" << field.grid.n << ' ' << field.grid.n << "\n65535\n";
  for (double v : field.values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    const auto level = static_cast<std::uint16_t>(std::lround(clamped * 65535.0));
    const char bytes[2] = {static_cast<char>(level >> 8), static_cast<char>(level & 0xff)};
    out.write(bytes, 2);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

spectral::Field read_field(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return read_csv_1d(path);
  if (ext == ".f64") return read_raw_2d(path);
  throw Error(ErrorCode::Usage, "unsupported field file '" + path.string() + "' (expected .csv or .f64)");
}

void write_field(const std::filesystem::path& stem, const spectral::Field& field) {
  if (field.grid.q == 1) {
    write_csv_1d(std::filesystem::path(stem.string() + ".csv"), field);
  } else {
    write_raw_2d(std::filesystem::path(stem.string() + ".f64"), field);
    write_pgm16(std::filesystem::path(stem.string() + ".pgm"), field);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, false);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Usage, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (key.empty()) throw Error(ErrorCode::Usage, "config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace infconv::io
