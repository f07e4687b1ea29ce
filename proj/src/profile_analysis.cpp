#include "levyk/profile_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyk/errors.hpp"
#include "levyk/parallel.hpp"

namespace levyk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

quad::Options kf_options() {
  quad::Options o;
  o.rel_tol = 1e-9;
  return o;
}

// int_a^inf g over doubling ranges until a range is negligible.
template <class F>
quad::Result half_line(const F& g, double a) {
  quad::Result total;
  double lo = a, width = std::max(1.0, a);
  for (int k = 0; k < 80; ++k) {
    const quad::Result piece = quad::adaptive(g, lo, lo + width, kf_options());
    total += piece;
    lo += width;
    width *= 2.0;
    if (std::abs(piece.value) <= 1e-16 * std::abs(total.value)) return total;
  }
  total.converged = false;
  return total;
}

// Integral over {y in R : |y - x| > r, |y| > r}, split at the kinks.
double kf_1d(const LevyModel& m, double r, double x, double* error) {
  const double log_fx = m.dim() == 1 ? log_profile(m.profile(), 1, x) : 0.0;
  auto g = [&](double y) {
    const double a = std::abs(x - y), b = std::abs(y);
    if (a == 0.0 || b == 0.0) return 0.0;
    return std::exp(log_profile(m.profile(), 1, a) + log_profile(m.profile(), 1, b) - log_fx);
  };
  // Excluded: (-r, r) and (x - r, x + r); x >= 0.
  quad::Result total = half_line([&](double u) { return g(-u); }, r);
  const double right = x + r;
  total += half_line(g, right);
  if (x - r > r) {
    const double a = r, b = x - r;
    const double mid = 0.5 * (a + b);
    total += quad::adaptive(g, a, mid, kf_options());
    total += quad::adaptive(g, mid, b, kf_options());
  }
  if (!total.converged) throw ConvergenceError("kf: quadrature did not converge", total.value, total.error);
  if (error) *error = total.error;
  return total.value;
}

// d >= 2: bipolar coordinates rho = |y|, sigma = |x - y| with
// dy = |S^{d-2}| rho^{d-2} sigma sin^{d-3}(theta) / |x| drho dsigma.
double kf_bipolar(const LevyModel& m, double r, double x, double* error) {
  const int d = m.dim();
  const double log_fx = log_profile(m.profile(), d, x);
  const double area = sphere_area(d - 1);
  auto inner = [&](double rho) {
    const double lo = std::max(r, std::abs(rho - x)), hi = rho + x;
    if (!(hi > lo)) return 0.0;
    const double log_frho = log_profile(m.profile(), d, rho);
    auto h = [&](double sigma) {
      const double c = (rho * rho + x * x - sigma * sigma) / (2.0 * rho * x);
      const double s2 = std::max(0.0, 1.0 - c * c);
      if (s2 == 0.0 && d == 2) return 0.0;
      const double jac = area * std::pow(rho, d - 2) * sigma * std::pow(s2, 0.5 * (d - 3)) / x;
      return jac * std::exp(log_profile(m.profile(), d, sigma) + log_frho - log_fx);
    };
    if (d == 2) return quad::endpoint_singular(h, lo, hi, 1e-10).value;
    return quad::adaptive(h, lo, hi, kf_options()).value;
  };
  std::vector<double> cuts{r};
  for (double c : {x - r, x, x + r})
    if (c > r) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  quad::Options o = kf_options();
  o.rel_tol = 1e-8;
  o.max_intervals = 64;
  quad::Result total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += quad::adaptive(inner, cuts[i], cuts[i + 1], o);
  double lo = cuts.back(), width = std::max(1.0, lo);
  bool done = false;
  for (int k = 0; k < 80 && !done; ++k) {
    const quad::Result piece = quad::adaptive(inner, lo, lo + width, o);
    total += piece;
    lo += width;
    width *= 2.0;
    done = std::abs(piece.value) <= 1e-14 * std::abs(total.value);
  }
  if (!done || !total.converged)
    throw ConvergenceError("kf: quadrature did not converge", total.value, total.error);
  if (error) *error = total.error;
  return total.value;
}

Trend compare(double before, double after) {
  if (after > before * (1.0 + 1e-2)) return Trend::increasing;
  if (after < before * (1.0 - 1e-2)) return Trend::decreasing;
  return Trend::flat;
}

void check_probes(std::span<const double> probes, double min_value, const char* what) {
  if (probes.empty()) throw DomainError(std::string(what) + ": no probes");
  if (!std::is_sorted(probes.begin(), probes.end())) throw DomainError(std::string(what) + ": probes must be ascending");
  if (!(probes.front() >= min_value)) throw DomainError(std::string(what) + ": probe radii out of range");
}

std::size_t nearest(std::span<const double> probes, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probes.size(); ++i)
    if (std::abs(std::log(probes[i] / target)) < std::abs(std::log(probes[best] / target))) best = i;
  return best;
}

}  // namespace

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::flat: return "flat";
    case Trend::increasing: return "increasing";
  }
  return "flat";
}

const char* profile_class_name(ProfileClass c) {
  switch (c) {
    case ProfileClass::subexponential: return "subexponential";
    case ProfileClass::exponential: return "exponential";
    case ProfileClass::super_exponential_rejected: return "super_exponential_rejected";
  }
  return "subexponential";
}

std::vector<double> default_kf_probes(int count) {
  if (count < 2) throw DomainError("default_kf_probes: need at least two probes");
  std::vector<double> p(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) p[static_cast<std::size_t>(i)] = std::pow(100.0, static_cast<double>(i) / (count - 1));
  return p;
}

double kf_integral(const LevyModel& model, double r, double x, double* error) {
  if (!(r >= 1.0)) throw DomainError("kf: r must be at least 1");
  if (!(x >= 1.0)) throw DomainError("kf: probe radii must be at least 1");
  return model.dim() == 1 ? kf_1d(model, r, x, error) : kf_bipolar(model, r, x, error);
}

KfReport kf(const LevyModel& model, double r, std::span<const double> probes) {
  if (!(r >= 1.0)) throw DomainError("kf: r must be at least 1");
  check_probes(probes, 1.0, "kf");
  KfReport rep;
  rep.r = r;
  rep.probes.assign(probes.begin(), probes.end());
  rep.values.resize(probes.size());
  rep.errors.resize(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) { rep.values[i] = kf_integral(model, r, probes[i], &rep.errors[i]); });
  const auto it = std::max_element(rep.values.begin(), rep.values.end());
  const std::size_t k = static_cast<std::size_t>(it - rep.values.begin());
  rep.kf = *it;
  rep.argmax_probe = probes[k];
  rep.max_at_last_probe = probes.size() > 1 && k + 1 == probes.size();
  if (probes.size() > 1) rep.trend = compare(rep.values[probes.size() - 2], rep.values.back());
  return rep;
}

ComparabilityConstant comparability_constant(const LevyModel& model, double r) {
  if (!(r > 0.0)) throw DomainError("comparability_constant: r must be positive");
  const ProfileSpec& p = model.profile();
  const int d = model.dim();
  auto ratio = [&](double s) { return std::exp(log_profile(p, d, s - r) - log_profile(p, d, s)); };
  ComparabilityConstant out;
  out.value = 0.0;
  std::vector<double> decade_max;
  constexpr int kPerDecade = 60;
  double start = 3.0 * r;
  for (int k = 0; k < 14; ++k) {
    double best = 0.0;
    for (int i = 0; i <= kPerDecade; ++i) {
      const double s = start * std::pow(10.0, static_cast<double>(i) / kPerDecade);
      const double v = ratio(s);
      best = std::max(best, v);
      if (v > out.value) {
        out.value = v;
        out.argmax = s;
      }
    }
    start *= 10.0;
    out.s_max = start;
    decade_max.push_back(best);
    const std::size_t n = decade_max.size();
    if (n >= 3) {
      const auto [lo, hi] = std::minmax({decade_max[n - 1], decade_max[n - 2], decade_max[n - 3]});
      if (hi <= 1.01 * lo) return out;
    }
  }
  out.stabilized = false;
  return out;
}

ProfileClassification classify_profile(const ProfileSpec& profile, std::span<const double> probes, int dim) {
  validate_profile(profile);
  check_probes(probes, std::numeric_limits<double>::min(), "classify_profile");
  const double last = probes.back();
  if (last / probes.front() < 999.999) throw DomainError("classify_profile: probes must span three decades");
  auto slope = [&](double r) { return log_profile(profile, dim, r) / r; };
  const double la = slope(probes[nearest(probes, last / 100.0)]);
  const double lb = slope(probes[nearest(probes, last / 10.0)]);
  const double lc = slope(last);

  ProfileClassification out;
  const double d1 = lb - la, d2 = lc - lb;
  if (d1 < 0.0 && d2 < 0.0 && std::abs(d2) >= 0.5 * std::abs(d1)) {
    out.kind = ProfileClass::super_exponential_rejected;
    out.limit_estimate = -kInf;
    return out;
  }
  const double denom = d2 - d1;
  out.limit_estimate = std::abs(denom) > 1e-14 * std::max(1.0, std::abs(lc)) ? lc - d2 * d2 / denom : lc;
  if (!std::isfinite(out.limit_estimate)) out.limit_estimate = lc;
  if (out.limit_estimate > -1e-2) {
    out.kind = ProfileClass::subexponential;
    out.limit_estimate = std::min(out.limit_estimate, 0.0);
    return out;
  }
  out.kind = ProfileClass::exponential;
  out.kappa = -out.limit_estimate;
  const std::size_t first_tail = nearest(probes, last / 10.0);
  for (std::size_t i = first_tail; i < probes.size(); ++i)
    out.h_tail_slope_probe.push_back(slope(probes[i]) + out.kappa);
  for (std::size_t i = 1; i < out.h_tail_slope_probe.size(); ++i)
    if (out.h_tail_slope_probe[i] < out.h_tail_slope_probe[i - 1] - 1e-12) out.h_eventually_increasing = false;
  return out;
}

SubexpCertificate subexp_bound_certificate(const ProfileSpec& profile, double epsilon,
                                           std::span<const double> probes, int dim) {
  if (!(epsilon > 0.0)) throw DomainError("subexp_bound_certificate: epsilon must be positive");
  validate_profile(profile);
  check_probes(probes, std::numeric_limits<double>::min(), "subexp_bound_certificate");
  std::vector<double> logs(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) logs[i] = log_profile(profile, dim, probes[i]) + epsilon * probes[i];
  const auto it = std::min_element(logs.begin(), logs.end());
  SubexpCertificate out;
  out.c_tilde = std::exp(*it);
  out.argmin_probe = probes[static_cast<std::size_t>(it - logs.begin())];
  const std::size_t n = logs.size();
  for (std::size_t i = n >= 3 ? n - 3 : 0; i + 1 < n; ++i)
    if (logs[i + 1] < logs[i]) out.flagged = true;
  return out;
}

}  // namespace levyk
