#pragma once

#include <limits>
#include <span>
#include <vector>

#include "levyk/levy_models.hpp"

namespace levyk {

/// Value of an exponential-moment integral, possibly infinite.
struct OmegaEvaluation {
  double value = 0.0;  // +inf when diverged
  double abs_error_estimate = 0.0;
  bool diverged = false;
};

enum class OmegaMethod { automatic, closed_form, quadrature };

enum class Side { small, large };

/// omega(xi) = int (cosh<xi,y> - 1) nu(dy). Throws UnsupportedProfile for
/// subexponential models at xi != 0.
OmegaEvaluation omega(const LevyModel& model, std::span<const double> xi,
                      OmegaMethod method = OmegaMethod::automatic);

/// omega along a ray: omega(s theta) for any unit theta (radial models).
OmegaEvaluation omega_radial(const LevyModel& model, double s,
                             OmegaMethod method = OmegaMethod::automatic);

/// omega restricted to {|y| <= r} (small) or {|y| > r} (large).
OmegaEvaluation omega_restricted(const LevyModel& model, std::span<const double> xi,
                                 double r, Side side);

/// d/ds omega(s theta) = int <theta,y> sinh(s <theta,y>) nu(y) dy, 0 < s < kappa.
OmegaEvaluation omega_prime(const LevyModel& model, double s, std::span<const double> theta,
                            OmegaMethod method = OmegaMethod::automatic);

/// omega*(kappa) = sup_theta omega(kappa theta); +inf when the integral diverges.
double omega_star(const LevyModel& model, OmegaMethod method = OmegaMethod::automatic);

/// Decay rate: kappa when alpha >= omega(kappa theta), otherwise the unique
/// s in (0, kappa) with omega(s theta) = alpha.
double gamma_alpha(const LevyModel& model, double alpha, std::span<const double> theta,
                   OmegaMethod method = OmegaMethod::automatic);

/// int_{|y| >= 1} e^{<xi,y>} nu(y) dy; diverged flag when infinite.
OmegaEvaluation exp_moment(const LevyModel& model, std::span<const double> xi);

struct DecayRateCurve {
  std::vector<double> alphas;
  std::vector<double> rates;
  std::vector<double> theta;
  double kappa = 0.0;
  double omega_star_kappa = std::numeric_limits<double>::infinity();
};

DecayRateCurve decay_rate_curve(const LevyModel& model, std::span<const double> alphas,
                                std::span<const double> theta);

/// kappa or UnsupportedProfile.
double require_kappa(const LevyModel& model);

}  // namespace levyk
