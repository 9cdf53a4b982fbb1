#pragma once

#include <cstdint>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "screenbem/bem/assembly.hpp"
#include "screenbem/em/plane_wave.hpp"

namespace screenbem::bem {

/// Galerkin right-hand side, tested against the edge basis.
struct RhsVector {
  CVector values;
};

/// Coefficients of the jump density rho = nu x [H_sc] in the edge basis.
struct DensityVector {
  CVector coefficients;
};

/// rhs_m = i omega eps int_S E0 . b_m. With this scaling A rho = rhs is the
/// Galerkin form of -nu x E0 = i N(rho) / (omega eps), i.e. the tangential
/// total electric field vanishes on the screen.
inline RhsVector assemble_rhs(const ScreenMesh& mesh, const EdgeBasisSet& basis, const em::PlaneWaveSpec& wave,
                              const em::MediumParams& medium,
                              const QuadratureRule& quad = geometry::quadrature_rule(5)) {
  RhsVector rhs{CVector::Zero(static_cast<Eigen::Index>(basis.size()))};
  if (wave.degenerate()) return rhs;
  const Complex scale = I * medium.omega() * medium.epsilon();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& locals = basis.on_triangle(t);
    if (locals.empty()) continue;
    const auto pts = geometry::map_rule(quad, mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2));
    for (const auto& lb : locals) {
      Complex acc{0.0, 0.0};
      for (const auto& p : pts) {
        const CVec3 e0 = em::plane_wave_fields(wave, medium, p.x).E;
        acc += p.w * to_complex(basis.evaluate(static_cast<std::size_t>(lb.basis), t, p.x)).dot(e0);
      }
      rhs.values[lb.basis] += scale * acc;
    }
  }
  return rhs;
}

/// Reciprocal condition number below which the dense solve is refused.
inline constexpr Real kMinRcond = 1e-13;

/// Dense LU solve of A rho = rhs.
inline DensityVector solve_density(const SystemMatrix& sys, const RhsVector& rhs) {
  if (sys.A.rows() != rhs.values.size()) throw std::invalid_argument("solve_density: dimension mismatch");
  if (rhs.values.isZero(0.0)) return {CVector::Zero(rhs.values.size())};
  const Eigen::PartialPivLU<CMatrix> lu(sys.A);
  // The rcond estimator misses exactly zero pivots, so check U directly too.
  const CVector pivots = lu.matrixLU().diagonal();
  const Real pivot_ratio = pivots.cwiseAbs().minCoeff() / pivots.cwiseAbs().maxCoeff();
  const Real rcond = std::min(lu.rcond(), pivot_ratio);
  if (!(rcond > kMinRcond)) {
    throw ConditioningError("solve_density: system matrix is numerically singular (rcond estimate " +
                                std::to_string(rcond) + ")",
                            rcond);
  }
  CVector x = lu.solve(rhs.values);
  if (!x.allFinite()) throw ConditioningError("solve_density: non-finite solution", rcond);
  return {std::move(x)};
}

/// ||A x - rhs|| / ||rhs|| (0 for a zero right-hand side).
inline Real relative_residual(const SystemMatrix& sys, const DensityVector& x, const RhsVector& rhs) {
  const Real nb = rhs.values.norm();
  if (nb == 0.0) return (sys.A * x.coefficients).norm();
  return (sys.A * x.coefficients - rhs.values).norm() / nb;
}

// Binary debug dump: 8-byte magic "SBEMSYS1", uint64 N, then A (N x N,
// row-major) and rhs (N) as (re, im) float64 pairs, all little-endian.

inline constexpr char kDumpMagic[8] = {'S', 'B', 'E', 'M', 'S', 'Y', 'S', '1'};

namespace detail {

inline void put_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("system dump: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void put_real(std::ostream& out, double x) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &x, sizeof bits);
  put_le(out, bits);
}

inline double get_real(std::istream& in) {
  const std::uint64_t bits = get_le(in);
  double x = 0.0;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace detail

inline void write_system_dump(std::ostream& out, const CMatrix& A, const CVector& rhs) {
  if (A.rows() != A.cols() || A.rows() != rhs.size()) throw std::invalid_argument("write_system_dump: bad shapes");
  out.write(kDumpMagic, sizeof kDumpMagic);
  detail::put_le(out, static_cast<std::uint64_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      detail::put_real(out, A(i, j).real());
      detail::put_real(out, A(i, j).imag());
    }
  }
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    detail::put_real(out, rhs[i].real());
    detail::put_real(out, rhs[i].imag());
  }
}

inline std::pair<CMatrix, CVector> read_system_dump(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kDumpMagic, sizeof magic) != 0) throw std::runtime_error("system dump: bad magic");
  const auto n = static_cast<Eigen::Index>(detail::get_le(in));
  CMatrix A(n, n);
  CVector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = detail::get_real(in);
      A(i, j) = {re, detail::get_real(in)};
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = detail::get_real(in);
    rhs[i] = {re, detail::get_real(in)};
  }
  return {std::move(A), std::move(rhs)};
}

}  // namespace screenbem::bem
