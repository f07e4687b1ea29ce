#pragma once

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "levyk/decay_analysis.hpp"
#include "levyk/levy_models.hpp"

namespace levyk {

/// V = -depth on |x| < radius.
struct SquareWell {
  double depth;
  double radius;
};

/// V = -depth exp(-x^2 / (2 width^2)).
struct GaussianWell {
  double depth;
  double width;
};

/// Piecewise linear V through (grid, values), zero outside the grid.
struct TabulatedPotential {
  std::vector<double> grid;
  std::vector<double> values;
};

using PotentialSpec = std::variant<SquareWell, GaussianWell, TabulatedPotential>;

/// Checks V <= 0 and, for tables, ascending nodes and a vanishing tail.
void validate_potential(const PotentialSpec& v);

double potential_value(const PotentialSpec& v, double x);

/// [lo, hi] outside of which |V| < 1e-16 max|V|.
std::pair<double, double> potential_support(const PotentialSpec& v);

/// Nodes x_i = i h, |i| <= N with N h >= half_width. A half_width of 0 is
/// chosen automatically by find_bound_state.
struct BsGrid {
  double h = 0.02;
  double half_width = 0.0;
};

struct BsEigen {
  double mu = 0.0;
  std::vector<double> x;    // grid nodes
  std::vector<double> phi;  // Perron vector on the nodes, unit discrete L2 norm
  int iterations = 0;
  bool converged = true;
  double dense_mu = 0.0;  // dense eigensolver on the same matrix, when requested
};

/// Largest eigenvalue of phi -> int g_alpha(. - z)|V(z)| phi(z) dz discretized
/// on the grid with cell-averaged weights (d = 1). Power iteration to 1e-10.
BsEigen bs_eigenvalue(const LevyModel& model, const PotentialSpec& v, double alpha,
                      const BsGrid& grid, bool dense_check = false);

struct BoundStateResult {
  double lambda = 0.0;        // ground-state energy, alpha = |lambda|
  double lambda_error = 0.0;  // |mu - 1| / |d mu / d alpha| at the root
  double mu_residual = 0.0;   // |mu(alpha) - 1|
  double h = 0.0;
  double half_width = 0.0;
  std::vector<double> x;
  std::vector<double> phi;
  DecayFit tail_fit;  // exponential with power correction, or power law when subexponential
  /// gamma_{|lambda|} (= kappa above the threshold) for exponential profiles, NaN otherwise.
  double predicted_rate = 0.0;
  bool converged = true;

  /// CSV with header `x,phi`.
  void write_csv(std::ostream& out) const;
};

/// Ground state of -L + V. Empty when mu(alpha) < 1 down to alpha = 1e-6.
std::optional<BoundStateResult> find_bound_state(const LevyModel& model, const PotentialSpec& v,
                                                 const BsGrid& grid = {});

struct GroundStateProfileReport {
  ComparabilityReport ratio;  // phi_0(x)/f(|x|)
  bool window_too_small = false;  // fewer than 20 tail points
};

/// Band of phi_0/f over x_lo <= |x| <= x_hi; subexponential profiles only.
GroundStateProfileReport ground_state_profile_report(const BoundStateResult& result,
                                                     const LevyModel& model, double x_lo = 5.0,
                                                     double x_hi = 40.0);

}  // namespace levyk
