#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "screenbem/inverse/fourier_data.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::inverse {

/// Square imaging window in plane coordinates: centre, half-width and
/// spacing (all lengths).
struct ImageGridSpec {
  Vec2 center = Vec2::Zero();
  Real half_width = 1.0;
  Real spacing = 0.05;
};

/// Band-limited density magnitude on a regular grid of the screen plane.
/// Point (i, j) sits at origin + (i * spacing, j * spacing); row-major in j.
class SupportImage {
 public:
  SupportImage() = default;
  SupportImage(PlaneFrame frame, Real k, Real tau, int nx, int ny, Vec2 origin, Real spacing,
               std::vector<Real> intensity)
      : frame_(frame), k_(k), tau_(tau), nx_(nx), ny_(ny), origin_(origin), spacing_(spacing),
        intensity_(std::move(intensity)) {
    if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("SupportImage: empty grid");
    if (intensity_.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {
      throw std::invalid_argument("SupportImage: intensity size does not match grid");
    }
    if (!(tau_ > 0.0 && tau_ < 1.0)) throw std::invalid_argument("SupportImage: threshold must lie in (0, 1)");
    for (Real v : intensity_) {
      if (!(v >= 0.0)) throw std::invalid_argument("SupportImage: intensity must be nonnegative");
    }
  }

  const PlaneFrame& frame() const { return frame_; }
  Real k() const { return k_; }
  Real threshold() const { return tau_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Vec2& origin() const { return origin_; }
  Real spacing() const { return spacing_; }
  const std::vector<Real>& intensity() const { return intensity_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  Vec2 point(int i, int j) const { return origin_ + spacing_ * Vec2(i, j); }
  Real at(int i, int j) const { return intensity_[index(i, j)]; }
  Real max_intensity() const { return intensity_.empty() ? 0.0 : *std::max_element(intensity_.begin(), intensity_.end()); }

  /// {intensity >= tau * max}; empty when the image vanishes.
  std::vector<bool> mask() const {
    const Real m = max_intensity();
    std::vector<bool> out(intensity_.size(), false);
    if (!(m > 0.0)) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = intensity_[i] >= tau_ * m;
    return out;
  }

  std::vector<Vec2> support_points() const {
    const auto msk = mask();
    std::vector<Vec2> out;
    for (int j = 0; j < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) {
        if (msk[index(i, j)]) out.push_back(point(i, j));
      }
    }
    return out;
  }

  /// Component label per grid point (-1 outside the support), 4-connectivity.
  std::vector<int> component_labels() const {
    const auto msk = mask();
    std::vector<int> label(msk.size(), -1);
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int j0 = 0; j0 < ny_; ++j0) {
      for (int i0 = 0; i0 < nx_; ++i0) {
        if (!msk[index(i0, j0)] || label[index(i0, j0)] >= 0) continue;
        stack.assign(1, {i0, j0});
        label[index(i0, j0)] = next;
        while (!stack.empty()) {
          const auto [i, j] = stack.back();
          stack.pop_back();
          const std::pair<int, int> nbrs[] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
          for (const auto& [a, b] : nbrs) {
            if (a < 0 || b < 0 || a >= nx_ || b >= ny_) continue;
            const std::size_t id = index(a, b);
            if (msk[id] && label[id] < 0) {
              label[id] = next;
              stack.emplace_back(a, b);
            }
          }
        }
        ++next;
      }
    }
    return label;
  }

  int component_count() const {
    const auto lbl = component_labels();
    return lbl.empty() ? 0 : *std::max_element(lbl.begin(), lbl.end()) + 1;
  }

  /// Mean of the support points (plane coordinates); nullopt for empty support.
  std::optional<Vec2> support_centroid() const {
    const auto pts = support_points();
    if (pts.empty()) return std::nullopt;
    Vec2 c = Vec2::Zero();
    for (const auto& p : pts) c += p;
    return c / static_cast<Real>(pts.size());
  }

 private:
  PlaneFrame frame_ = PlaneFrame::xy();
  Real k_ = 0.0;
  Real tau_ = 0.2;
  int nx_ = 0;
  int ny_ = 0;
  Vec2 origin_ = Vec2::Zero();
  Real spacing_ = 0.0;
  std::vector<Real> intensity_;
};

inline constexpr Real kDefaultSupportThreshold = 0.2;

/// |band-limited inverse Fourier sum of the samples| on the grid.
inline SupportImage reconstruct_support(const FourierSamples& fs, const ImageGridSpec& grid,
                                        Real tau = kDefaultSupportThreshold) {
  if (fs.empty()) throw std::invalid_argument("reconstruct_support: no Fourier samples");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("reconstruct_support: threshold must lie in (0, 1)");
  if (!(grid.half_width > 0.0) || !(grid.spacing > 0.0)) {
    throw std::invalid_argument("reconstruct_support: grid half-width and spacing must be positive");
  }
  if (grid.spacing > pi / (2.0 * fs.k) * (1.0 + 1e-12)) {
    throw std::invalid_argument("reconstruct_support: grid spacing exceeds pi / (2k)");
  }
  const int n = 2 * static_cast<int>(std::ceil(grid.half_width / grid.spacing - 1e-9)) + 1;
  const Real half = 0.5 * (n - 1) * grid.spacing;
  const Vec2 origin = grid.center - Vec2(half, half);
  std::vector<Real> intensity(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  const Real norm = 1.0 / (4.0 * pi * pi);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 s = origin + grid.spacing * Vec2(i, j);
      CVec2 acc = CVec2::Zero();
      for (std::size_t q = 0; q < fs.size(); ++q) {
        acc += (fs.weights[q] * std::exp(I * fs.xi[q].dot(s))) * fs.values[q];
      }
      intensity[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
          norm * acc.norm();
    }
  }
  return SupportImage(fs.frame, fs.k, tau, n, n, origin, grid.spacing, std::move(intensity));
}

/// Symmetric Hausdorff distance between two finite point sets; infinity if
/// exactly one of them is empty.
inline Real hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<Real>::infinity();
  const auto directed = [](const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
    Real worst = 0.0;
    for (const auto& x : p) {
      Real best = std::numeric_limits<Real>::infinity();
      for (const auto& y : q) best = std::min(best, (x - y).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

/// Filled axis-aligned rectangle [cx +- a/2] x [cy +- b/2] sampled at `step`.
inline std::vector<Vec2> sample_rectangle(const Vec2& center, Real a, Real b, Real step) {
  const int na = std::max(1, static_cast<int>(std::ceil(a / step)));
  const int nb = std::max(1, static_cast<int>(std::ceil(b / step)));
  std::vector<Vec2> out;
  for (int j = 0; j <= nb; ++j) {
    for (int i = 0; i <= na; ++i) out.push_back(center + Vec2(a * (Real(i) / na - 0.5), b * (Real(j) / nb - 0.5)));
  }
  return out;
}

// Text format of SupportImage:
//   support_image 1
//   frame <nx> <ny> <nz> <offset>
//   k <k>
//   tau <tau>
//   grid <nx> <ny> <x0> <y0> <spacing>
//   max_intensity <m>
//   columns x y intensity
//   p <x> <y> <intensity>     (nx * ny records, row-major in y)

inline void write_support_image(std::ostream& out, const SupportImage& img) {
  using io::format_real;
  const Vec3& n = img.frame().normal();
  out << "support_image 1\n";
  out << "frame " << format_real(n.x()) << ' ' << format_real(n.y()) << ' ' << format_real(n.z()) << ' '
      << format_real(img.frame().offset()) << '\n';
  out << "k " << format_real(img.k()) << '\n';
  out << "tau " << format_real(img.threshold()) << '\n';
  out << "grid " << img.nx() << ' ' << img.ny() << ' ' << format_real(img.origin().x()) << ' '
      << format_real(img.origin().y()) << ' ' << format_real(img.spacing()) << '\n';
  out << "max_intensity " << format_real(img.max_intensity()) << '\n';
  out << "columns x y intensity\n";
  for (int j = 0; j < img.ny(); ++j) {
    for (int i = 0; i < img.nx(); ++i) {
      const Vec2 p = img.point(i, j);
      out << "p " << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(img.at(i, j)) << '\n';
    }
  }
}

inline SupportImage read_support_image(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::optional<PlaneFrame> frame;
  std::optional<Real> k, tau;
  int nx = 0, ny = 0;
  Vec2 origin = Vec2::Zero();
  Real spacing = 0.0;
  std::vector<Real> intensity;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    try {
      if (!header) {
        if (tok.size() != 2 || tok[0] != "support_image" || tok[1] != "1") {
          throw std::runtime_error("expected 'support_image 1'");
        }
        header = true;
      } else if (tok[0] == "p" && tok.size() == 4) {
        intensity.push_back(io::parse_real(tok[3]));
      } else if (tok[0] == "frame" && tok.size() == 5) {
        frame = PlaneFrame(Vec3(io::parse_real(tok[1]), io::parse_real(tok[2]), io::parse_real(tok[3])),
                           io::parse_real(tok[4]));
      } else if (tok[0] == "k" && tok.size() == 2) {
        k = io::parse_real(tok[1]);
      } else if (tok[0] == "tau" && tok.size() == 2) {
        tau = io::parse_real(tok[1]);
      } else if (tok[0] == "grid" && tok.size() == 6) {
        nx = static_cast<int>(io::parse_int(tok[1]));
        ny = static_cast<int>(io::parse_int(tok[2]));
        origin = Vec2(io::parse_real(tok[3]), io::parse_real(tok[4]));
        spacing = io::parse_real(tok[5]);
      } else if (tok[0] == "max_intensity" || tok[0] == "columns") {
        // informational
      } else {
        throw std::runtime_error("unrecognized record '" + tok[0] + "'");
      }
    } catch (const std::exception& e) {
      throw io::ParseError(lineno, e.what());
    }
  }
  if (!header) throw std::runtime_error("read_support_image: empty input");
  if (!frame || !k || !tau || nx == 0) throw std::runtime_error("read_support_image: incomplete header");
  return SupportImage(*frame, *k, *tau, nx, ny, origin, spacing, std::move(intensity));
}

inline void save_support_image(const std::string& path, const SupportImage& img) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_support_image(out, img);
}

inline SupportImage load_support_image(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_support_image(in);
}

}  // namespace screenbem::inverse
