#pragma once
// Artifact writers: CSV tables, OBJ meshes, Landau profile exports. All
// numeric output goes through the shortest round-trip representation
// (std::to_chars), so files are byte-identical across runs on the same
// floating-point environment.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "liesphere/errors.hpp"
#include "liesphere/spectral.hpp"
#include "liesphere/surface.hpp"

namespace liesphere::io {

inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string body;
  for (size_t c = 0; c < header.size(); ++c) {
    if (c) body += ',';
    body += header[c];
  }
  body += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("csv row width does not match the header");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) body += ',';
      body += fmt_double(row[c]);
    }
    body += '\n';
  }
  write_text_file(path, body);
}

struct MeshStats {
  int vertices = 0;
  int triangles = 0;
};

// OBJ export of a reconstructed surface grid: vertex lines in grid storage
// order (second index outer), skipping degenerate nodes; each grid quad with
// four regular corners contributes two triangles, quads touching a skipped
// node are dropped.
inline MeshStats emit_mesh(const surface::SurfaceGrid& s, const std::filesystem::path& path) {
  const GridSpec& g = s.samples.g;
  Grid<int> index(g);
  MeshStats stats;
  std::string body;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      if (s.status.at(i, j) != surface::SampleStatus::ok) {
        index.at(i, j) = 0;
        continue;
      }
      index.at(i, j) = ++stats.vertices;
      const Vec3& r = s.samples.at(i, j).r;
      body += "v " + fmt_double(r.x) + ' ' + fmt_double(r.y) + ' ' + fmt_double(r.z) + '\n';
    }
  for (int j = 0; j + 1 < g.n2; ++j)
    for (int i = 0; i + 1 < g.n1; ++i) {
      const int a = index.at(i, j), b = index.at(i + 1, j);
      const int c = index.at(i + 1, j + 1), d = index.at(i, j + 1);
      if (!a || !b || !c || !d) continue;
      body += "f " + std::to_string(a) + ' ' + std::to_string(b) + ' ' + std::to_string(c) + '\n';
      body += "f " + std::to_string(a) + ' ' + std::to_string(c) + ' ' + std::to_string(d) + '\n';
      stats.triangles += 2;
    }
  write_text_file(path, body);
  return stats;
}

// profile table: one row per sample, pole rows carry nan coordinates and a
// set flag so downstream plotting can break the curve there
inline void write_profile_csv(const std::filesystem::path& path,
                              const spectral::LandauProfile& profile) {
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.points.size());
  for (const auto& pt : profile.points)
    rows.push_back({pt.y, pt.z, pt.radius, pt.pole ? 1.0 : 0.0});
  write_csv(path, {"y", "z", "radius", "pole"}, rows);
}

}  // namespace liesphere::io
