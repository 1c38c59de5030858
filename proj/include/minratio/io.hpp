#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "minratio/errors.hpp"
#include "minratio/points.hpp"

namespace minratio {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw InvalidArgument("not a number: '" + std::string(s) + "'");
  }
  return x;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Point CSV: a `dim,seed,replicate,rate_or_n` header line, the matching
// values line, then one row of coordinates per point.
inline std::string point_set_to_csv(const PointSet& points) {
  std::string out = "dim,seed,replicate,rate_or_n\n";
  const auto& prov = points.provenance();
  out += std::to_string(points.dim()) + "," + std::to_string(prov.seed) + "," + std::to_string(prov.replicate) +
         "," + format_double(prov.rate_or_n) + "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) out += ',';
      out += format_double(p[k]);
    }
    out += '\n';
  }
  return out;
}

/// Parses a point CSV. Without an explicit region, the points are placed in
/// the smallest cube [0, s]^d with integer s that contains them.
inline PointSet point_set_from_csv(std::string_view text, std::optional<Region> region = std::nullopt) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 2 || lines[0] != "dim,seed,replicate,rate_or_n") {
    throw InvalidArgument("point csv: missing 'dim,seed,replicate,rate_or_n' header");
  }
  auto meta = split(lines[1]);
  if (meta.size() != 4) throw InvalidArgument("point csv line 2: expected 4 fields");
  const auto dim = static_cast<std::size_t>(parse_double(meta[0]));
  Provenance prov{SourceKind::fixture, parse_double(meta[3]),
                  static_cast<std::uint64_t>(std::stoull(meta[1])), static_cast<std::uint64_t>(std::stoull(meta[2]))};
  std::vector<double> coords;
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t li = 2; li < lines.size(); ++li) {
    auto fields = split(lines[li]);
    if (fields.size() != dim) {
      throw InvalidArgument("point csv line " + std::to_string(li + 1) + ": expected " + std::to_string(dim) +
                            " coordinates");
    }
    for (const auto& f : fields) {
      const double x = parse_double(f);
      hi = std::max(hi, x);
      lo = std::min(lo, x);
      coords.push_back(x);
    }
  }
  if (!region) {
    if (lo < 0.0) throw InvalidArgument("point csv: negative coordinates need an explicit region");
    region = Region::cube(dim, std::max(1.0, std::ceil(hi)));
  }
  return PointSet(*region, std::move(coords), prov);
}

}  // namespace minratio
