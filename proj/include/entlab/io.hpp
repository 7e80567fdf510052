#pragma once

// Locale-free number formatting, CSV tables and output files.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/flow.hpp"
#include "entlab/mesh.hpp"
#include "entlab/profile.hpp"
#include "json.hpp"

namespace entlab {

/// 17 significant digits, '.' decimal point, independent of the C locale.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

/// 64-bit FNV-1a, used for config fingerprints.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, 16);
  std::string s(buf, r.ptr);
  return std::string(16 - s.size(), '0') + s;
}

using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

inline std::string format_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  };
  return std::visit(V{}, c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "table row width does not match its header");
    rows.push_back(std::move(row));
  }
};

/// Header line with the config hash and seed, written at the top of every CSV file.
struct Stamp {
  std::string tool = "entlab";
  std::string scenario;
  std::string config_hash;
  std::uint64_t seed = 0;

  std::string line() const {
    return "# " + tool + " " + scenario + " config_hash=" + config_hash + " seed=" + std::to_string(seed);
  }
};

inline std::string to_csv(const Table& t, const Stamp& stamp) {
  std::string out = stamp.line() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

/// Profile samples with columns u, f, f', f'', K.
inline Table profile_table(const Profile& f, double lo, double hi, int n) {
  require(n >= 2 && lo < hi, "profile export needs n >= 2 and lo < hi");
  Table t{{"u", "f", "df", "d2f", "K"}, {}};
  for (int i = 0; i < n; ++i) {
    const double u = lo + (hi - lo) * i / (n - 1);
    const Jet j = f.jet(u);
    t.add({u, j.f, j.df, j.d2f, -j.d2f / j.f});
  }
  return t;
}

/// One row per trace segment, in face layout coordinates.
inline Table trace_table(const GeodesicTrace& tr) {
  Table t{{"segment", "face", "entry_x", "entry_y", "exit_x", "exit_y", "length", "exit_half_edge"}, {}};
  for (std::size_t k = 0; k < tr.segments.size(); ++k) {
    const auto& sg = tr.segments[k];
    t.add({static_cast<std::int64_t>(k), static_cast<std::int64_t>(sg.face), sg.entry.x, sg.entry.y, sg.exit.x,
           sg.exit.y, sg.length, static_cast<std::int64_t>(sg.exit_half_edge)});
  }
  return t;
}

/// Columns t, u, v, du, dv, K, w.
inline Table trajectory_table(const std::vector<TrajectoryPoint>& samples) {
  Table t{{"t", "u", "v", "du", "dv", "K", "w"}, {}};
  for (const auto& p : samples) t.add({p.t, p.u, p.v, p.du, p.dv, p.K, p.w});
  return t;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(Error::Kind::Config, "cannot open output file " + p.string());
  os << text;
  if (!os) fail(Error::Kind::Config, "failed writing " + p.string());
}

inline void ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) fail(Error::Kind::Config, "cannot create output directory " + p.string() + ": " + ec.message());
}

}  // namespace entlab
