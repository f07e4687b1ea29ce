#pragma once

#include <span>
#include <string>
#include <vector>

#include "levyk/levy_models.hpp"

namespace levyk {

enum class Trend { decreasing, flat, increasing };

const char* trend_name(Trend t);

struct KfReport {
  double r = 1.0;
  double kf = 0.0;  // max over probes, a lower estimate of the sup
  double argmax_probe = 0.0;
  Trend trend = Trend::flat;  // last probe against the one before
  bool max_at_last_probe = false;
  std::vector<double> probes;
  std::vector<double> values;
  std::vector<double> errors;
};

/// Log-spaced probes in [1, 100].
std::vector<double> default_kf_probes(int count = 25);

/// K_f(r) = sup_{|x| >= 1} int_{|y-x| > r, |y| > r} f(|x-y|) f(|y|) dy / f(|x|),
/// approximated by the maximum over probe radii taken along e_1.
KfReport kf(const LevyModel& model, double r, std::span<const double> probes);

/// The integral of kf at one probe radius x.
double kf_integral(const LevyModel& model, double r, double x, double* error = nullptr);

struct ComparabilityConstant {
  double value = 1.0;  // sup of f(s - r)/f(s) over s >= 3r
  double argmax = 0.0;
  double s_max = 0.0;
  bool stabilized = true;
};

/// sup over s in [3r, s_max] of f(s - r)/f(s), s_max extended by decades until
/// three consecutive decade maxima agree within 1%.
ComparabilityConstant comparability_constant(const LevyModel& model, double r);

enum class ProfileClass { subexponential, exponential, super_exponential_rejected };

const char* profile_class_name(ProfileClass c);

struct ProfileClassification {
  ProfileClass kind = ProfileClass::subexponential;
  double kappa = 0.0;         // exponential class only
  double limit_estimate = 0.0;  // extrapolated lim log f(r)/r
  /// log h(r)/r at the tail probes, h = f e^{kappa r} (exponential class).
  std::vector<double> h_tail_slope_probe;
  bool h_eventually_increasing = true;
};

/// Classifies the profile from log f(r)/r on ascending probes spanning at
/// least three decades. Super-exponential profiles are reported as rejected.
ProfileClassification classify_profile(const ProfileSpec& profile, std::span<const double> probes,
                                       int dim = 1);

struct SubexpCertificate {
  double c_tilde = 0.0;  // min over probes of f(r) e^{eps r}
  double argmin_probe = 0.0;
  bool flagged = false;  // f e^{eps r} decreasing at the tail probes
};

SubexpCertificate subexp_bound_certificate(const ProfileSpec& profile, double epsilon,
                                           std::span<const double> probes, int dim = 1);

}  // namespace levyk
