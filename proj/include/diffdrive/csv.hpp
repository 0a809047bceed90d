#pragma once

// Telemetry serialization. Doubles are written in shortest round-trip form,
// so parsing the file back reproduces the exact bits; runs are deterministic,
// so the same scenario always produces byte-identical output.
//
// Column layout: t,x,y,psi,V,omega,M1,M2,E,x_ref,y_ref,err. The reference
// columns are populated only for closed-loop runs; open-loop files keep the
// header but leave them blank. When an electric drive was simulated the
// requested torques and the per-phase currents are appended after err.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "diffdrive/dynamics.hpp"

namespace diffdrive {

inline constexpr std::string_view kTelemetryHeader =
    "t,x,y,psi,V,omega,M1,M2,E,x_ref,y_ref,err";

namespace detail {
inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}
}  // namespace detail

// Serializes every decimation-th row (the first row always included).
inline std::string telemetry_to_csv(const Telemetry& tel, int decimation = 1) {
  if (decimation < 1) throw std::invalid_argument("csv: decimation must be at least 1");
  const bool with_motor = !tel.motor.empty();
  std::string out{kTelemetryHeader};
  if (with_motor) {
    out += ",M1_ref,M2_ref";
    const std::size_t phases = tel.motor.front().currents_left.size();
    for (std::size_t k = 1; k <= phases; ++k) out += ",iL" + std::to_string(k);
    for (std::size_t k = 1; k <= phases; ++k) out += ",iR" + std::to_string(k);
  }
  out += '\n';
  for (std::size_t n = 0; n < tel.rows.size(); n += static_cast<std::size_t>(decimation)) {
    const TelemetryRow& r = tel.rows[n];
    detail::append_number(out, r.t);
    out += ',';
    detail::append_number(out, r.state.x);
    out += ',';
    detail::append_number(out, r.state.y);
    out += ',';
    detail::append_number(out, r.state.heading);
    out += ',';
    detail::append_number(out, r.state.speed);
    out += ',';
    detail::append_number(out, r.state.yaw_rate);
    out += ',';
    detail::append_number(out, r.torque.left);
    out += ',';
    detail::append_number(out, r.torque.right);
    out += ',';
    detail::append_number(out, r.energy);
    out += ',';
    if (tel.closed_loop && !std::isnan(r.ref_x)) detail::append_number(out, r.ref_x);
    out += ',';
    if (tel.closed_loop && !std::isnan(r.ref_y)) detail::append_number(out, r.ref_y);
    out += ',';
    if (tel.closed_loop && !std::isnan(r.err)) detail::append_number(out, r.err);
    if (with_motor) {
      const MotorTraceRow& m = tel.motor[n];
      out += ',';
      detail::append_number(out, m.ref_left);
      out += ',';
      detail::append_number(out, m.ref_right);
      for (double i : m.currents_left) {
        out += ',';
        detail::append_number(out, i);
      }
      for (double i : m.currents_right) {
        out += ',';
        detail::append_number(out, i);
      }
    }
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN marks a blank cell

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::out_of_range("csv: no column named '" + std::string(name) + "'");
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (header) {
      for (const auto c : cells) table.columns.emplace_back(c);
      header = false;
      continue;
    }
    if (cells.size() != table.columns.size())
      throw std::invalid_argument("csv: row " + std::to_string(table.rows.size() + 1) +
                                  " has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(table.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc{} || res.ptr != c.data() + c.size())
        throw std::invalid_argument("csv: bad number '" + std::string(c) + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw std::invalid_argument("csv: empty document");
  return table;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("short write: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string out((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return out;
}

}  // namespace diffdrive
