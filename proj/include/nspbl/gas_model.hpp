#pragma once

// Polytropic closure P(rho) = A rho^gamma shared by ions and electrons.

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "nspbl/errors.hpp"

namespace nspbl {

/// Densities below this are treated as vacuum and rejected.
inline constexpr double kMinDensity = 1e-12;

struct GasParameters {
  double A = 1.0 / 3.0;
  double gamma = 3.0;
  double mu = 1.0;

  void validate() const {
    if (!(A > 0.0) || !std::isfinite(A))
      throw PreconditionViolation("gas: pressure coefficient A must be > 0");
    if (!(gamma > 1.0) || !std::isfinite(gamma))
      throw PreconditionViolation("gas: adiabatic exponent gamma must be > 1");
    if (mu != 1.0) throw PreconditionViolation("gas: viscosity mu is fixed to 1");
  }

  /// sqrt(gamma A), the sound-speed prefactor.
  double sound_prefactor() const { return std::sqrt(gamma * A); }
};

namespace detail {
inline void require_density(double rho, const char* what) {
  if (!(rho >= kMinDensity) || !std::isfinite(rho))
    throw DomainError(std::string(what) + ": density must be >= 1e-12, got " +
                      std::to_string(rho));
}
}  // namespace detail

inline double pressure(const GasParameters& p, double rho) {
  detail::require_density(rho, "pressure");
  return p.A * std::pow(rho, p.gamma);
}

/// P'(rho) = C(rho)^2.
inline double pressure_derivative(const GasParameters& p, double rho) {
  detail::require_density(rho, "pressure_derivative");
  return p.gamma * p.A * std::pow(rho, p.gamma - 1.0);
}

inline double pressure_second_derivative(const GasParameters& p, double rho) {
  detail::require_density(rho, "pressure_second_derivative");
  return p.gamma * (p.gamma - 1.0) * p.A * std::pow(rho, p.gamma - 2.0);
}

inline double sound_speed(const GasParameters& p, double rho) {
  detail::require_density(rho, "sound_speed");
  return p.sound_prefactor() * std::pow(rho, 0.5 * (p.gamma - 1.0));
}

/// Inverse of sound_speed: the density whose sound speed is c (> 0).
inline double density_from_sound_speed(const GasParameters& p, double c) {
  if (!(c > 0.0)) throw DomainError("density_from_sound_speed: c must be > 0");
  return std::pow(c * c / (p.gamma * p.A), 1.0 / (p.gamma - 1.0));
}

/// 2-Riemann invariant z = u - 2C(rho)/(gamma-1), constant along R2 curves.
inline double riemann_invariant_2(const GasParameters& p, double rho, double u) {
  return u - 2.0 * sound_speed(p, rho) / (p.gamma - 1.0);
}

/// Relative-entropy potential Phi(rho, rho_hat) = int_{rho_hat}^{rho} (P(s)-P(rho_hat))/s^2 ds.
///
/// Closed-form antiderivative A s^{gamma-1}/(gamma-1) + P(rho_hat)/s away from the
/// diagonal; near it the closed form cancels to O(r^2), so a 10-point Gauss rule on
/// the (relatively accurate) integrand is used instead.
inline double phi_potential(const GasParameters& p, double rho, double rho_hat) {
  detail::require_density(rho, "phi_potential");
  detail::require_density(rho_hat, "phi_potential");
  const double p_hat = p.A * std::pow(rho_hat, p.gamma);
  const double r = (rho - rho_hat) / rho_hat;
  if (std::abs(r) < 0.1) {
    if (r == 0.0) return 0.0;
    auto integrand = [&](double s) {
      const double ds = (s - rho_hat) / rho_hat;
      return p_hat * std::expm1(p.gamma * std::log1p(ds)) / (s * s);
    };
    return boost::math::quadrature::gauss<double, 10>::integrate(integrand, rho_hat, rho);
  }
  auto antiderivative = [&](double s) {
    return p.A * std::pow(s, p.gamma - 1.0) / (p.gamma - 1.0) + p_hat / s;
  };
  return antiderivative(rho) - antiderivative(rho_hat);
}

}  // namespace nspbl
