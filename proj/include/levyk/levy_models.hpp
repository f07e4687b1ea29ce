#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "levyk/quadrature.hpp"

namespace levyk {

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

/// f(r) = (1_{r<=1} r^{-d-beta} + 1_{r>1} r^{-delta}) exp(-kappa r^eta).
struct TemperedStable {
  double beta;
  double kappa;
  double eta;
  double delta;
};

/// f(r) = r^{-d-beta}. The density is normalized so that Psi(xi) = |xi|^beta.
struct PureStable {
  double beta;
};

/// f(r) = (1_{r<=1} r^{-d-beta} + 1_{r>1} r^{-(d+beta+1)/2}) exp(-m^{1/beta} r).
/// The density itself is the exact Bessel-K kernel whose exponent is
/// (|xi|^2 + m^{2/beta})^{beta/2} - m.
struct RelativisticStable {
  double beta;
  double m;
};

/// Tabulated decreasing profile; log-log interpolation between nodes and
/// extrapolation of the last log-log slope beyond the last node.
struct CustomTabulated {
  std::vector<double> radii;
  std::vector<double> values;
};

using ProfileSpec =
    std::variant<TemperedStable, PureStable, RelativisticStable, CustomTabulated>;

/// Validates parameter ranges and table monotonicity; throws DomainError.
void validate_profile(const ProfileSpec& profile);

/// Profile value f(r) for r > 0 in dimension `dim`.
double profile_value(const ProfileSpec& profile, int dim, double r);

/// log f(r); stays finite where f itself underflows.
double log_profile(const ProfileSpec& profile, int dim, double r);

const char* profile_kind_name(const ProfileSpec& profile);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class ClosedFormPsi { none, stable, relativistic };

enum class PsiMethod { automatic, closed_form, quadrature };

struct PsiEvaluation {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  enum class Method { closed_form, quadrature } method = Method::closed_form;
};

struct PsiTableCache;

/// Radial symmetric pure-jump Levy model: dimension, profile, the density nu
/// built on top of it and, when known, the analytic characteristic exponent.
class LevyModel {
 public:
  /// Validates the profile, checks integrability of (1 ^ |y|^2) nu and, for
  /// closed-form models, cross-validates quadrature against the closed form.
  static LevyModel create(int dim, ProfileSpec profile, double comparability = 1.0,
                          bool use_closed_form = true);

  int dim() const noexcept { return dim_; }
  const ProfileSpec& profile() const noexcept { return *profile_; }
  double comparability() const noexcept { return comparability_; }
  ClosedFormPsi closed_form() const noexcept { return closed_form_; }
  bool radial() const noexcept { return true; }
  bool psi_monotone() const noexcept { return psi_monotone_; }

  /// Profile f(r).
  double profile_at(double r) const { return profile_value(*profile_, dim_, r); }

  /// Radial Levy density nu(r), r > 0.
  double density(double r) const;
  double log_density(double r) const;
  /// log nu(r) + kappa r without cancellation at large r; requires kappa().
  double log_density_tilted(double r) const;

  /// Exponential rate kappa of an f = e^{-kappa r} h(r) profile; nullopt for
  /// subexponential profiles. Tabulated profiles extrapolate by a power law
  /// and are therefore subexponential.
  std::optional<double> kappa() const noexcept { return kappa_; }

  /// Mass nu({|y| > r}).
  double tail_mass(double r) const;

  /// Psi(s e_1) by quadrature, cached on a log grid for repeated use by the
  /// kernel inversions when no closed form exists.
  double psi_interpolated(double s) const;

  /// True when Psi extends analytically to the strip |Im z| < kappa with a
  /// cheap evaluation (closed-form relativistic models).
  bool has_complex_psi() const noexcept {
    return closed_form_ == ClosedFormPsi::relativistic;
  }

  /// Analytic continuation of the radial exponent, d = 1, |Im z| < kappa.
  std::complex<double> psi_complex(std::complex<double> z) const;

  /// Closed form exponent at radius s (requires closed_form() != none).
  double psi_closed(double s) const;

  /// Exponent at radius s using the cheapest accurate route.
  double psi_fast(double s) const;

 private:
  LevyModel() = default;

  int dim_ = 1;
  std::shared_ptr<const ProfileSpec> profile_;
  double comparability_ = 1.0;
  ClosedFormPsi closed_form_ = ClosedFormPsi::none;
  std::optional<double> kappa_;
  double log_scale_ = 0.0;
  bool psi_monotone_ = true;
  std::shared_ptr<PsiTableCache> table_;
};

/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int dim);

/// Normalizing constant c with Psi(xi) = |xi|^beta for nu = c |y|^{-d-beta}.
double stable_constant(int dim, double beta);

double norm(std::span<const double> x);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// nu(x) for x != 0; throws DomainError at the origin.
double nu_density(const LevyModel& model, std::span<const double> x);

/// Characteristic exponent Psi(xi).
PsiEvaluation psi(const LevyModel& model, std::span<const double> xi,
                  PsiMethod method = PsiMethod::automatic);

/// Psi at radius s along e_1.
PsiEvaluation psi_radial(const LevyModel& model, double s,
                         PsiMethod method = PsiMethod::automatic);

/// Psi*(r) = sup_{|xi| <= r} Psi(xi).
double psi_star(const LevyModel& model, double r);

/// Psi*_-(s) = sup{r > 0 : Psi*(r) = s}; relative accuracy 1e-10 in s.
double psi_star_inv(const LevyModel& model, double s);

struct ScalingCertificate {
  double c2 = 0.0;
  double alpha = 0.0;
  bool degenerate = false;
};

/// Largest alpha on the grid {0.05, 0.10, ..., 2.00} for which
/// Psi*(lambda r) >= C2 lambda^alpha Psi*(r) holds with a C2 that does not
/// deteriorate when the lambda range is extended from its square root to the
/// full grid (ratio of minima >= 0.9), together with that C2.
ScalingCertificate estimate_lower_scaling(const LevyModel& model,
                                          std::span<const double> r_grid,
                                          std::span<const double> lambda_grid);

/// Constant C5 = C2^{-1/alpha} / Psi*_-(1) with 1/Psi*_-(1/t) <= C5 t^{1/alpha}
/// for t >= 1 implied by a scaling certificate.
double small_scale_constant(const LevyModel& model, const ScalingCertificate& cert);

/// The integral of (1 ^ r^2) nu over R^d.
quad::Result levy_integrability(const LevyModel& model);

// Radial reductions used by Psi and omega in any dimension.
namespace radial {

/// 1 - (spherical mean of cos<xi,y>) at z = |xi||y|.
double one_minus_cos_mean(int dim, double z);
/// (spherical mean of cosh<xi,y>) - 1 at z = |xi||y|.
double cosh_mean_minus_one(int dim, double z);
/// log of the spherical mean of cosh at z > 0.
double log_cosh_mean(int dim, double z);
/// log_cosh_mean(dim, z) - z.
double log_cosh_mean_scaled(int dim, double z);
/// d/dz of the spherical mean of cosh.
double cosh_mean_derivative(int dim, double z);
/// log of that derivative, z > 0.
double log_cosh_mean_derivative(int dim, double z);
/// log_cosh_mean_derivative(dim, z) - z.
double log_cosh_mean_derivative_scaled(int dim, double z);
/// Spherical mean of cos at z.
double cos_mean(int dim, double z);

}  // namespace radial

/// log K_mu(z), accurate for large z where K_mu underflows.
double log_bessel_k(double mu, double z);
/// log K_mu(z) + z.
double log_bessel_k_scaled(double mu, double z);

}  // namespace levyk
