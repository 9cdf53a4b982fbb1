#pragma once

#include <cmath>
#include <stdexcept>

#include "screenbem/types.hpp"

namespace screenbem::em {

/// Homogeneous lossless medium at a fixed angular frequency. The wavenumber
/// is always derived, k = omega sqrt(eps mu).
class MediumParams {
 public:
  MediumParams(Real omega, Real epsilon, Real mu) : omega_(omega), epsilon_(epsilon), mu_(mu) {
    if (!(omega > 0.0) || !(epsilon > 0.0) || !(mu > 0.0) || !std::isfinite(omega) || !std::isfinite(epsilon) ||
        !std::isfinite(mu)) {
      throw std::invalid_argument("MediumParams: omega, epsilon and mu must be positive and finite");
    }
    k_ = omega_ * std::sqrt(epsilon_ * mu_);
  }

  /// eps = mu = 1 with the frequency chosen so the wavelength is `wavelength`.
  static MediumParams normalized(Real wavelength = 1.0) { return {2.0 * pi / wavelength, 1.0, 1.0}; }

  Real omega() const { return omega_; }
  Real epsilon() const { return epsilon_; }
  Real mu() const { return mu_; }
  Real k() const { return k_; }
  Real wavelength() const { return 2.0 * pi / k_; }
  /// sqrt(mu / eps), the ratio |E| / |H| of an outgoing wave.
  Real impedance() const { return std::sqrt(mu_ / epsilon_); }

 private:
  Real omega_;
  Real epsilon_;
  Real mu_;
  Real k_ = 0.0;
};

}  // namespace screenbem::em
