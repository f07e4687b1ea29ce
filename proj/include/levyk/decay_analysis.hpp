#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "levyk/kernels.hpp"

namespace levyk {

struct DecayFit {
  double rate = 0.0;   // exponential coefficient
  double power = 0.0;  // exponent of the polynomial correction
  double constant = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double rms_residual = 0.0;
  int n_points = 0;
  bool flagged = false;  // rms residual above 0.05
};

struct FitOptions {
  /// Default: drop the smallest 20% of the radii, and radii below 5 when at
  /// least 8 points lie beyond 5.
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  std::span<const unsigned> flags;  // nonzero entries are excluded
  std::span<const double> errors;   // points with error > 1% of value are excluded
};

/// Least squares of log v against -rate x (+ power log x) + const.
DecayFit fit_exponential_rate(std::span<const double> points, std::span<const double> values,
                              bool power_correction, const FitOptions& opt = {});

/// Least squares of log v against power log x + const; rate = 0.
DecayFit fit_powerlaw(std::span<const double> points, std::span<const double> values,
                      const FitOptions& opt = {});

struct ComparabilityReport {
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;
  double band = 0.0;  // sup / inf
  double x_lo = 0.0;
  double x_hi = 0.0;
  int n_points = 0;
};

/// inf and sup of num/den over window points (flags, when given, exclude).
ComparabilityReport ratio_report(std::span<const double> points, std::span<const double> num,
                                 std::span<const double> den, double x_lo, double x_hi,
                                 std::span<const unsigned> flags = {});

struct TransitionCurve {
  std::vector<double> alphas;
  std::vector<double> fitted_rates;
  std::vector<double> predicted_rates;
  std::vector<double> residuals;
  std::vector<DecayFit> fits;
  double omega_star = 0.0;

  /// CSV with header `alpha,fitted_rate,predicted_rate,residual`.
  void write_csv(std::ostream& out) const;
};

/// For each alpha: resolvent grid on the (positive) points, exponential fit
/// with power correction over the window, paired with gamma_alpha(e_1).
TransitionCurve transition_sweep(const LevyModel& model, std::span<const double> alphas,
                                 std::span<const double> points, std::optional<double> x_lo = {},
                                 std::optional<double> x_hi = {});

}  // namespace levyk
