#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "levyk/levy_models.hpp"

namespace levyk {

enum class KernelKind { heat, resolvent };

enum class KernelMethod { fourier_1d, hankel_radial, time_quadrature, decomposition };

/// Per-point flag bits of a KernelGrid.
namespace kernel_flag {
inline constexpr unsigned underflow = 1u;     // true value below 1e-280, reported as 0
inline constexpr unsigned small_time = 2u;    // t nu(x) surrogate used
inline constexpr unsigned clamped = 4u;       // negative quadrature noise clamped to 0
inline constexpr unsigned nonconverged = 8u;  // error estimate above the target
inline constexpr unsigned singular = 16u;     // kernel is infinite at this point
}  // namespace kernel_flag

std::string kernel_flag_names(unsigned flags);

struct KernelGrid {
  KernelKind kind = KernelKind::heat;
  double parameter = 0.0;  // t for heat grids, alpha for resolvent grids
  int dim = 1;
  KernelMethod method = KernelMethod::fourier_1d;
  std::vector<double> points;
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<unsigned> flags;

  std::size_t size() const noexcept { return points.size(); }
  /// CSV with header `x,value,abs_error,flags`, 17 significant digits.
  void write_csv(std::ostream& out) const;
};

struct HeatOptions {
  double tol = 1e-14;           // tail tolerance defining the frequency cutoff
  double safety = 4.0;          // multiplier on the cutoff radius
  bool allow_tilt = true;       // contour shift for models with an analytic exponent
  bool allow_small_time = true; // t nu(x) surrogate when the cutoff exceeds 1e7
};

/// Heat kernel p_t at the given points (signed in 1D, radii in d >= 2).
KernelGrid heat_kernel(const LevyModel& model, double t, std::span<const double> points,
                       const HeatOptions& opt = {});

/// p_t(0) = (2 pi)^{-d} int e^{-t Psi(xi)} dxi.
double heat_kernel_zero(const LevyModel& model, double t, const HeatOptions& opt = {});

/// Resolvent g_alpha by inversion of 1/(alpha + Psi). Only d = 1; throws
/// NonIntegrableSymbol otherwise. g_alpha(0) is flagged singular when infinite.
KernelGrid resolvent_freq(const LevyModel& model, double alpha, std::span<const double> points);

/// Resolvent g_alpha = int_0^inf e^{-alpha t} p_t dt by trapezoidal quadrature
/// in log t; any dimension.
KernelGrid resolvent_time(const LevyModel& model, double alpha, std::span<const double> points);

/// int_0^b g_alpha(x) dx for b > 0 (d = 1).
double resolvent_cumulative(const LevyModel& model, double alpha, double b);

/// Jump decomposition p_t = e^{-t|nubar|} ptilde + ptilde * Pbar in d = 1.
struct JumpOptions {
  double h = 0.01;          // spacing of the convolution grid
  double half_width = 400;  // the grid covers [-half_width, half_width]
};

struct JumpDecomposition {
  double r = 1.0;
  double t = 0.0;
  double big_mass = 0.0;  // |nubar_r|
  int poisson_terms = 0;
  double series_remainder = 0.0;  // Poisson tail mass beyond the last term
  double lost_mass = 0.0;         // Poisson-series mass outside the grid
  bool aliasing_warning = false;
  double total_mass = 0.0;  // e^{-t|nubar|} int ptilde + int ptilde * int Pbar
  /// sup over |x| in [1, 30] of nubar^{*n}(x)/nu(x), n = 1, 2, 3.
  std::vector<double> convolution_ratio_sup;
  KernelGrid small_grid;
  KernelGrid big_grid;
  KernelGrid recombined;
};

JumpDecomposition jump_decomposition(const LevyModel& model, double r, double t,
                                     std::span<const double> points, int n_terms,
                                     const JumpOptions& opt = {});

/// Audit of p_t(x) <= p_t(0) exp(-<xi0, x> + t omega(xi0)) along x e_1.
struct ExpBoundReport {
  std::vector<double> points;
  std::vector<double> kernel;
  std::vector<double> bound;
  double p0 = 0.0;
  double omega_xi0 = 0.0;
  double max_violation = 0.0;  // max(kernel - bound), may be negative
  std::size_t violations = 0;  // points with kernel - bound > tolerance
};

ExpBoundReport exp_upper_bound_check(const LevyModel& model, double t,
                                     std::span<const double> xi0, std::span<const double> points,
                                     double tolerance = 1e-8);

struct MassReport {
  double mass = 0.0;
  double grid_part = 0.0;
  double tail_part = 0.0;
  double error = 0.0;
};

/// int p_t over R (d = 1): composite Gauss-Kronrod on a sinh-mapped axis plus a
/// fitted power tail.
MassReport heat_mass(const LevyModel& model, double t);

/// int g_alpha over R (d = 1): exact mass of [-x0, x0], composite quadrature
/// in log x beyond it and a fitted power tail.
MassReport resolvent_mass(const LevyModel& model, double alpha);

/// Semigroup audit: sup over |x| <= x_max of |p_t * p_t - p_{2t}| / p_{2t} with
/// the convolution by trapezoid on the uniform grid of spacing h over
/// [-half_width, half_width] (d = 1).
struct SemigroupReport {
  double sup_relative = 0.0;
  double argmax = 0.0;
};

SemigroupReport semigroup_check(const LevyModel& model, double t, double x_max = 20.0,
                                double h = 0.1, double half_width = 200.0);

/// max over t of p_t(0)(2 pi)^d / (Psi*_-(1/t))^d.
double l1_constant(const LevyModel& model, std::span<const double> t_grid);

}  // namespace levyk
