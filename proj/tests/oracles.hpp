#pragma once

// Closed-form reference values computed independently of the library.

#include <cmath>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Cauchy heat kernel t / (pi (t^2 + x^2)).
inline double cauchy_heat(double t, double x) { return t / (kPi * (t * t + x * x)); }

/// 3D Cauchy heat kernel t / (pi^2 (t^2 + r^2)^2).
inline double cauchy_heat_3d(double t, double r) { return t / (kPi * kPi * std::pow(t * t + r * r, 2)); }

/// (|xi|^2 + m^{2/beta})^{beta/2} - m.
inline double relativistic_psi(double beta, double m, double s) {
  return std::pow(s * s + std::pow(m, 2.0 / beta), beta / 2.0) - m;
}

/// m - (m^{2/beta} - s^2)^{beta/2} for s <= m^{1/beta}.
inline double relativistic_omega(double beta, double m, double s) {
  return m - std::pow(std::pow(m, 2.0 / beta) - s * s, beta / 2.0);
}

inline double relativistic_omega_prime(double beta, double m, double s) {
  return beta * s * std::pow(std::pow(m, 2.0 / beta) - s * s, beta / 2.0 - 1.0);
}

/// sqrt(2 m alpha - alpha^2) capped at m (beta = 1).
inline double relativistic_gamma(double m, double alpha) {
  return alpha >= m ? m : std::sqrt(2.0 * m * alpha - alpha * alpha);
}

/// Leading two terms of the large-x expansion of the stable resolvent
/// (1/pi) int_0^inf cos(x xi) / (alpha + xi^beta) dxi in d = 1, obtained from
/// the geometric series of the symbol and the Fourier transform of |xi|^gamma.
inline double stable_resolvent_tail(double beta, double alpha, double x) {
  double sum = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const double g = k * beta;
    const double ft = -std::tgamma(1.0 + g) * std::sin(kPi * g / 2.0) / kPi * std::pow(x, -1.0 - g);
    sum += ((k % 2) ? -1.0 : 1.0) * std::pow(alpha, -k - 1.0) * ft;
  }
  return sum;
}

}  // namespace oracle
