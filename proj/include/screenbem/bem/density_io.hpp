#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "screenbem/bem/solve.hpp"
#include "screenbem/io_format.hpp"

namespace screenbem::bem {

// Text format of DensityVector, one coefficient per interior edge in basis
// order:
//   density 1
//   count <N>
//   c <re> <im>

inline void write_density(std::ostream& out, const DensityVector& rho) {
  out << "density 1\n";
  out << "count " << rho.coefficients.size() << '\n';
  for (Eigen::Index i = 0; i < rho.coefficients.size(); ++i) {
    out << "c " << io::format_real(rho.coefficients[i].real()) << ' ' << io::format_real(rho.coefficients[i].imag())
        << '\n';
  }
}

inline DensityVector read_density(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::optional<long> count;
  std::vector<Complex> values;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    try {
      if (!header) {
        if (tok.size() != 2 || tok[0] != "density" || tok[1] != "1") throw std::runtime_error("expected 'density 1'");
        header = true;
      } else if (tok[0] == "c" && tok.size() == 3) {
        values.emplace_back(io::parse_real(tok[1]), io::parse_real(tok[2]));
      } else if (tok[0] == "count" && tok.size() == 2) {
        count = io::parse_int(tok[1]);
      } else {
        throw std::runtime_error("unrecognized record '" + tok[0] + "'");
      }
    } catch (const std::exception& e) {
      throw io::ParseError(lineno, e.what());
    }
  }
  if (!header) throw std::runtime_error("read_density: empty input");
  if (!count || *count != static_cast<long>(values.size())) {
    throw std::runtime_error("read_density: coefficient count does not match header");
  }
  DensityVector rho;
  rho.coefficients = Eigen::Map<const CVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return rho;
}

inline void save_density(const std::string& path, const DensityVector& rho) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_density(out, rho);
}

inline DensityVector load_density(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_density(in);
}

}  // namespace screenbem::bem
