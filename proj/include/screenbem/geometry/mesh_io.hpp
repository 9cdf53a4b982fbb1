#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "screenbem/geometry/screen_mesh.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::geometry {

// Plain-text indexed triangle list:
//   screenmesh 1
//   v x y z          (one per vertex)
//   t i j k          (one per triangle, 0-based)
//   frame nx ny nz d
// Numbers are written in shortest round-trip form, so write -> read -> write
// reproduces the file byte for byte.

inline void write_mesh(std::ostream& out, const ScreenMesh& mesh) {
  using io::format_real;
  out << "screenmesh 1\n";
  for (const auto& v : mesh.vertices()) {
    out << "v " << format_real(v.x()) << ' ' << format_real(v.y()) << ' ' << format_real(v.z()) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  const Vec3& n = mesh.frame().normal();
  out << "frame " << format_real(n.x()) << ' ' << format_real(n.y()) << ' ' << format_real(n.z()) << ' '
      << format_real(mesh.frame().offset()) << '\n';
}

inline ScreenMesh read_mesh(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::optional<PlaneFrame> frame;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    try {
      if (!header) {
        if (tok.size() != 2 || tok[0] != "screenmesh" || tok[1] != "1") {
          throw io::ParseError(lineno, "expected header 'screenmesh 1'");
        }
        header = true;
      } else if (tok[0] == "v" && tok.size() == 4) {
        vertices.emplace_back(io::parse_real(tok[1]), io::parse_real(tok[2]), io::parse_real(tok[3]));
      } else if (tok[0] == "t" && tok.size() == 4) {
        triangles.push_back({static_cast<int>(io::parse_int(tok[1])), static_cast<int>(io::parse_int(tok[2])),
                             static_cast<int>(io::parse_int(tok[3]))});
      } else if (tok[0] == "frame" && tok.size() == 5) {
        if (frame) throw io::ParseError(lineno, "duplicate frame record");
        frame.emplace(Vec3(io::parse_real(tok[1]), io::parse_real(tok[2]), io::parse_real(tok[3])),
                      io::parse_real(tok[4]));
      } else {
        throw io::ParseError(lineno, "unrecognized record '" + tok[0] + "'");
      }
    } catch (const io::ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw io::ParseError(lineno, e.what());
    }
  }
  if (!header) throw std::runtime_error("read_mesh: empty input");
  if (!frame) throw std::runtime_error("read_mesh: missing frame record");
  return {std::move(vertices), std::move(triangles), *frame};
}

inline void save_mesh(const std::string& path, const ScreenMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh(out, mesh);
}

inline ScreenMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_mesh(in);
}

}  // namespace screenbem::geometry
