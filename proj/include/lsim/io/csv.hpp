#pragma once

// CSV output: shortest round-trip numbers, '.' decimals, '\n' line endings.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lsim/core.hpp"
#include "lsim/io/config.hpp"

namespace lsim::io {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

struct Column {
  std::string name;
  std::span<const double> values;
};

/// Column table; every column must have the same length.
inline std::string csv_table(std::span<const Column> cols) {
  if (cols.empty()) throw Error(ErrorKind::schema, "table has no columns");
  const std::size_t n = cols.front().values.size();
  std::string out;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].values.size() != n)
      throw Error(ErrorKind::schema, "column '" + cols[c].name + "' has a different length");
    out += (c ? "," : "") + cols[c].name;
  }
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      out += format_double(cols[c].values[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string csv_text(const TimeSeries& ts) {
  ts.validate();
  std::vector<Column> cols{{"t_us", ts.t_us}};
  for (std::size_t c = 0; c < channel_count; ++c)
    cols.push_back({std::string(channel_names[c]), ts.channels[c]});
  return csv_table(cols);
}

/// Long format: one row per (delta2, t) cell, delta2 outermost.
inline std::string csv_text(const SpectralMap& map) {
  map.validate();
  std::string out = "delta2_khz,t_us,value\n";
  for (std::size_t i = 0; i < map.delta2_khz.size(); ++i)
    for (std::size_t j = 0; j < map.t_us.size(); ++j)
      out += format_double(map.delta2_khz[i]) + ',' + format_double(map.t_us[j]) + ',' +
             format_double(map.at(i, j)) + '\n';
  return out;
}

inline void write_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  write_text(path, csv_text(ts));
}

inline void write_csv(const SpectralMap& map, const std::filesystem::path& path) {
  write_text(path, csv_text(map));
}

inline void write_csv(std::span<const Column> cols, const std::filesystem::path& path) {
  write_text(path, csv_table(cols));
}

}  // namespace lsim::io
