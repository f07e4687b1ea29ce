#include "levyk/levy_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "levyk/errors.hpp"

namespace levyk {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool in_open(double v, double lo, double hi) { return v > lo && v < hi; }

// Index of the table interval holding log r, clamped to the end intervals.
std::size_t table_interval(const CustomTabulated& t, double r) {
  auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
  std::size_t i = static_cast<std::size_t>(it - t.radii.begin());
  if (i == 0) return 0;
  return std::min(i - 1, t.radii.size() - 2);
}

double log_tabulated(const CustomTabulated& t, double r) {
  const std::size_t i = table_interval(t, r);
  const double x0 = std::log(t.radii[i]);
  const double x1 = std::log(t.radii[i + 1]);
  const double y0 = std::log(t.values[i]);
  const double y1 = std::log(t.values[i + 1]);
  const double slope = (y1 - y0) / (x1 - x0);
  return y0 + slope * (std::log(r) - x0);
}

double relativistic_log_constant(int dim, const RelativisticStable& p) {
  const double d = dim;
  const double mu = 0.5 * (d + p.beta);
  const double kappa = std::pow(p.m, 1.0 / p.beta);
  return std::log(p.beta) + 0.5 * (p.beta - d) * std::log(2.0) + mu * std::log(kappa) -
         0.5 * d * std::log(kPi) - std::lgamma(1.0 - 0.5 * p.beta);
}

}  // namespace

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double log_bessel_k_scaled(double mu, double z) {
  if (z <= 0.0) throw DomainError("log_bessel_k: argument must be positive");
  if (z < 1e-8 && mu > 0.0) {
    // K_mu(z) ~ Gamma(mu) 2^{mu-1} z^{-mu}
    return std::lgamma(mu) + (mu - 1.0) * std::log(2.0) - mu * std::log(z) + z;
  }
  if (z < 600.0) return std::log(boost::math::cyl_bessel_k(mu, z)) + z;
  // Hankel expansion; at z >= 600 six terms are far below double precision.
  const double m4 = 4.0 * mu * mu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (m4 - odd * odd) / (k * 8.0 * z);
    sum += term;
  }
  return 0.5 * std::log(kPi / (2.0 * z)) + std::log(sum);
}

double log_bessel_k(double mu, double z) {
  if (z < 600.0 && z > 0.0) {
    if (z < 1e-8 && mu > 0.0) return log_bessel_k_scaled(mu, z) - z;
    return std::log(boost::math::cyl_bessel_k(mu, z));
  }
  return log_bessel_k_scaled(mu, z) - z;
}

namespace radial {

namespace {

double nu_index(int dim) { return 0.5 * dim - 1.0; }

// sum_{k>=1} s^k (z^2/4)^k Gamma(d/2) / (k! Gamma(d/2 + k)), s = +-1.
double bessel_mean_series(int dim, double z, double sign) {
  const double q = 0.25 * z * z;
  const double a = 0.5 * dim;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= sign * q / (k * (a + k - 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double cos_mean(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) return std::cos(z);
  if (dim == 3) return z == 0.0 ? 1.0 : std::sin(z) / z;
  if (z < 2.0) return 1.0 + bessel_mean_series(dim, z, -1.0);
  const double nu = nu_index(dim);
  return std::exp(std::lgamma(0.5 * dim) + nu * std::log(2.0 / z)) *
         boost::math::cyl_bessel_j(nu, z);
}

double one_minus_cos_mean(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) {
    const double s = std::sin(0.5 * z);
    return 2.0 * s * s;
  }
  if (z < 2.0) return -bessel_mean_series(dim, z, -1.0);
  return 1.0 - cos_mean(dim, z);
}

double cosh_mean_minus_one(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) {
    const double s = std::sinh(0.5 * z);
    return 2.0 * s * s;
  }
  if (z < 2.0) return bessel_mean_series(dim, z, 1.0);
  return std::exp(log_cosh_mean(dim, z)) - 1.0;
}

double log_cosh_mean_scaled(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) return std::log1p(std::exp(-2.0 * z)) - std::log(2.0);
  if (z < 2.0) return std::log1p(bessel_mean_series(dim, z, 1.0)) - z;
  const double nu = nu_index(dim);
  const double pre = std::lgamma(0.5 * dim) + nu * std::log(2.0 / z);
  if (z < 600.0) return pre + std::log(boost::math::cyl_bessel_i(nu, z)) - z;
  const double m4 = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(m4 - odd * odd) / (k * 8.0 * z);
    sum += term;
  }
  return pre - 0.5 * std::log(2.0 * kPi * z) + std::log(sum);
}

double log_cosh_mean(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) return z + std::log1p(std::exp(-2.0 * z)) - std::log(2.0);
  if (z < 2.0) return std::log1p(bessel_mean_series(dim, z, 1.0));
  return log_cosh_mean_scaled(dim, z) + z;
}

double cosh_mean_derivative(int dim, double z) {
  if (dim == 1) return std::sinh(z);
  if (z == 0.0) return 0.0;
  return std::exp(log_cosh_mean_derivative(dim, std::abs(z))) * (z < 0 ? -1.0 : 1.0);
}

double log_cosh_mean_derivative(int dim, double z) {
  return log_cosh_mean_derivative_scaled(dim, z) + std::abs(z);
}

double log_cosh_mean_derivative_scaled(int dim, double z) {
  z = std::abs(z);
  if (dim == 1) return std::log1p(-std::exp(-2.0 * z)) - std::log(2.0);
  // d/dz Lambda_d(z) = (z/d) Lambda_{d+2}(z)
  return std::log(z / dim) + log_cosh_mean_scaled(dim + 2, z);
}

}  // namespace radial

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

void validate_profile(const ProfileSpec& profile) {
  std::visit(
      overloaded{
          [](const TemperedStable& p) {
            if (!in_open(p.beta, 0.0, 2.0)) throw DomainError("tempered_stable: beta must lie in (0,2)");
            if (!(p.kappa > 0.0)) throw DomainError("tempered_stable: kappa must be positive");
            if (!(p.eta > 0.0 && p.eta <= 1.0)) throw DomainError("tempered_stable: eta must lie in (0,1]");
            if (!(p.delta >= 0.0)) throw DomainError("tempered_stable: delta must be non-negative");
          },
          [](const PureStable& p) {
            if (!in_open(p.beta, 0.0, 2.0)) throw DomainError("pure_stable: beta must lie in (0,2)");
          },
          [](const RelativisticStable& p) {
            if (!in_open(p.beta, 0.0, 2.0)) throw DomainError("relativistic_stable: beta must lie in (0,2)");
            if (!(p.m > 0.0)) throw DomainError("relativistic_stable: m must be positive");
          },
          [](const CustomTabulated& p) {
            if (p.radii.size() < 2 || p.radii.size() != p.values.size())
              throw DomainError("custom_tabulated: need >= 2 radii and matching values");
            for (std::size_t i = 0; i < p.radii.size(); ++i) {
              if (!(p.radii[i] > 0.0)) throw DomainError("custom_tabulated: radii must be positive");
              if (!(p.values[i] > 0.0)) throw DomainError("custom_tabulated: values must be positive");
              if (i > 0 && !(p.radii[i] > p.radii[i - 1]))
                throw DomainError("custom_tabulated: radii must be strictly ascending");
              if (i > 0 && p.values[i] > p.values[i - 1])
                throw DomainError("custom_tabulated: values must be non-increasing");
            }
          },
      },
      profile);
}

double log_profile(const ProfileSpec& profile, int dim, double r) {
  if (!(r > 0.0)) throw DomainError("profile: radius must be positive");
  const double d = dim;
  return std::visit(
      overloaded{
          [&](const TemperedStable& p) {
            const double power = r <= 1.0 ? -(d + p.beta) * std::log(r) : -p.delta * std::log(r);
            return power - p.kappa * std::pow(r, p.eta);
          },
          [&](const PureStable& p) { return -(d + p.beta) * std::log(r); },
          [&](const RelativisticStable& p) {
            const double kappa = std::pow(p.m, 1.0 / p.beta);
            const double power =
                r <= 1.0 ? -(d + p.beta) * std::log(r) : -0.5 * (d + p.beta + 1.0) * std::log(r);
            return power - kappa * r;
          },
          [&](const CustomTabulated& p) { return log_tabulated(p, r); },
      },
      profile);
}

double profile_value(const ProfileSpec& profile, int dim, double r) {
  return std::exp(log_profile(profile, dim, r));
}

const char* profile_kind_name(const ProfileSpec& profile) {
  return std::visit(overloaded{
                        [](const TemperedStable&) { return "tempered_stable"; },
                        [](const PureStable&) { return "pure_stable"; },
                        [](const RelativisticStable&) { return "relativistic_stable"; },
                        [](const CustomTabulated&) { return "custom_tabulated"; },
                    },
                    profile);
}

double sphere_area(int dim) {
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double stable_constant(int dim, double beta) {
  const double d = dim;
  return beta * std::pow(2.0, beta - 1.0) * std::tgamma(0.5 * (d + beta)) /
         (std::pow(kPi, 0.5 * d) * std::tgamma(1.0 - 0.5 * beta));
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Psi by quadrature
// ---------------------------------------------------------------------------

namespace {

// Radial weight w(r) = |S^{d-1}| r^{d-1} nu(r).
double log_radial_weight(const LevyModel& m, double r) {
  return std::log(sphere_area(m.dim())) + (m.dim() - 1) * std::log(r) + m.log_density(r);
}

double radial_weight(const LevyModel& m, double r) { return std::exp(log_radial_weight(m, r)); }

// k * w(r) evaluated in log space so that a vanishing k tames a huge w.
double weighted(const LevyModel& m, double k, double r) {
  if (k == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(k)) + log_radial_weight(m, r)), k);
}

quad::Result psi_by_quadrature(const LevyModel& m, double s) {
  quad::Result total;
  if (s == 0.0) return total;
  const int d = m.dim();
  const double half = kPi / s;
  auto integrand = [&](double r) {
    if (r < 1e-150) return 0.0;
    return weighted(m, radial::one_minus_cos_mean(d, s * r), r);
  };
  quad::Options opt;
  opt.rel_tol = 1e-13;

  // Near field [0, 1]: endpoint singularity of nu tamed by (1 - cos).
  const double a0 = std::min(1.0, half);
  total += quad::endpoint_singular(integrand, 0.0, a0, 1e-14);
  for (double a = a0; a < 1.0; a += half) total += quad::adaptive(integrand, a, std::min(1.0, a + half), opt);

  // Mid field [1, R]: half-period panels of the non-negative integrand.
  const double far_start = std::max(1.0, 20.0 * half);
  for (double a = 1.0; a < far_start;) {
    const double b = std::min(far_start, a + std::max(half, a));
    total += quad::adaptive(integrand, a, b, opt);
    a = b;
  }

  // Tail: mass part minus oscillatory part, the latter as an accelerated
  // alternating panel series.
  auto weight = [&](double r) { return radial_weight(m, r); };
  const quad::Result mass = quad::half_line(weight, far_start, 1e-14);
  auto osc_panel = [&](int k) {
    const double a = far_start + k * half;
    return quad::adaptive([&](double r) { return radial::cos_mean(d, s * r) * weight(r); }, a, a + half, opt);
  };
  const quad::Result osc = quad::alternating_panel_sum(osc_panel, 2);
  total.value += mass.value - osc.value;
  total.error += mass.error + osc.error;
  total.converged = total.converged && mass.converged && osc.converged;
  return total;
}

}  // namespace

// Psi on a log grid with a cubic B-spline in (log s, log Psi); power-law
// extrapolation from the end slopes.
class PsiTable {
 public:
  explicit PsiTable(const LevyModel& m) {
    const int per_decade = 40;
    const double lo = -4.0, hi = 4.0;
    const int n = static_cast<int>((hi - lo) * per_decade) + 1;
    step_ = std::log(10.0) / per_decade;
    log_lo_ = lo * std::log(10.0);
    log_hi_ = log_lo_ + (n - 1) * step_;
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double s = std::exp(log_lo_ + i * step_);
      y[static_cast<std::size_t>(i)] = std::log(psi_by_quadrature(m, s).value);
    }
    slope_lo_ = (y[1] - y[0]) / step_;
    slope_hi_ = (y[static_cast<std::size_t>(n - 1)] - y[static_cast<std::size_t>(n - 2)]) / step_;
    y_lo_ = y.front();
    y_hi_ = y.back();
    spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        y.begin(), y.end(), log_lo_, step_);
  }

  double operator()(double s) const {
    if (s == 0.0) return 0.0;
    const double x = std::log(s);
    if (x < log_lo_) return std::exp(y_lo_ + slope_lo_ * (x - log_lo_));
    if (x > log_hi_) return std::exp(y_hi_ + slope_hi_ * (x - log_hi_));
    return std::exp((*spline_)(x));
  }

 private:
  double step_ = 0, log_lo_ = 0, log_hi_ = 0;
  double slope_lo_ = 0, slope_hi_ = 0, y_lo_ = 0, y_hi_ = 0;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

namespace {

}  // namespace

struct PsiTableCache {
  std::once_flag once;
  std::unique_ptr<PsiTable> table;
};

// ---------------------------------------------------------------------------
// LevyModel
// ---------------------------------------------------------------------------

LevyModel LevyModel::create(int dim, ProfileSpec profile, double comparability,
                            bool use_closed_form) {
  if (dim < 1) throw DomainError("LevyModel: dimension must be >= 1");
  if (!(comparability >= 1.0)) throw DomainError("LevyModel: comparability constant must be >= 1");
  validate_profile(profile);
  LevyModel m;
  m.dim_ = dim;
  m.comparability_ = comparability;
  m.profile_ = std::make_shared<const ProfileSpec>(std::move(profile));
  std::visit(overloaded{
                 [&](const TemperedStable& p) {
                   if (p.eta == 1.0) m.kappa_ = p.kappa;
                 },
                 [&](const PureStable& p) {
                   m.log_scale_ = std::log(stable_constant(dim, p.beta));
                   if (use_closed_form) m.closed_form_ = ClosedFormPsi::stable;
                 },
                 [&](const RelativisticStable& p) {
                   m.kappa_ = std::pow(p.m, 1.0 / p.beta);
                   m.log_scale_ = relativistic_log_constant(dim, p);
                   if (use_closed_form) m.closed_form_ = ClosedFormPsi::relativistic;
                 },
                 [&](const CustomTabulated& p) {
                   const std::size_t n = p.radii.size();
                   const double first = (std::log(p.values[1]) - std::log(p.values[0])) /
                                        (std::log(p.radii[1]) - std::log(p.radii[0]));
                   const double last = (std::log(p.values[n - 1]) - std::log(p.values[n - 2])) /
                                       (std::log(p.radii[n - 1]) - std::log(p.radii[n - 2]));
                   if (!(first > -dim - 2.0))
                     throw DomainError("custom_tabulated: leading slope makes nu non-integrable near 0");
                   if (!(last < -static_cast<double>(dim)))
                     throw DomainError("custom_tabulated: trailing slope makes nu non-integrable at infinity");
                 },
             },
             *m.profile_);

  const quad::Result moment = levy_integrability(m);
  if (!std::isfinite(moment.value) || !moment.converged)
    throw DomainError("LevyModel: integral of (1 ^ |y|^2) nu does not converge");

  m.table_ = std::make_shared<PsiTableCache>();
  if (m.closed_form_ != ClosedFormPsi::none) {
    for (double s : {0.5, 2.0}) {
      const double q = psi_by_quadrature(m, s).value;
      const double c = m.psi_closed(s);
      if (std::abs(q - c) > 1e-6 * (1.0 + c))
        throw Error("LevyModel: quadrature exponent disagrees with the closed form at |xi| = " +
                    std::to_string(s));
    }
  }
  return m;
}

double LevyModel::density(double r) const {
  if (!(r > 0.0)) throw DomainError("nu: density is singular at the origin");
  if (std::holds_alternative<RelativisticStable>(*profile_)) return std::exp(log_density(r));
  if (std::holds_alternative<PureStable>(*profile_)) return std::exp(log_scale_) * profile_at(r);
  return profile_at(r);
}

double LevyModel::log_density_tilted(double r) const {
  if (!kappa_) throw UnsupportedProfile("log_density_tilted: profile has no exponential rate");
  if (!(r > 0.0)) throw DomainError("nu: density is singular at the origin");
  if (const auto* p = std::get_if<RelativisticStable>(&*profile_)) {
    const double mu = 0.5 * (dim_ + p->beta);
    return log_scale_ + log_bessel_k_scaled(mu, *kappa_ * r) - mu * std::log(r);
  }
  const auto& p = std::get<TemperedStable>(*profile_);
  if (r <= 1.0) return log_density(r) + *kappa_ * r;
  return -p.delta * std::log(r);
}

double LevyModel::log_density(double r) const {
  if (!(r > 0.0)) throw DomainError("nu: density is singular at the origin");
  if (const auto* p = std::get_if<RelativisticStable>(&*profile_)) {
    const double mu = 0.5 * (dim_ + p->beta);
    return log_scale_ + log_bessel_k(mu, *kappa_ * r) - mu * std::log(r);
  }
  if (std::holds_alternative<PureStable>(*profile_))
    return log_scale_ + log_profile(*profile_, dim_, r);
  return log_profile(*profile_, dim_, r);
}

double LevyModel::tail_mass(double r) const {
  if (!(r > 0.0)) throw DomainError("tail_mass: radius must be positive");
  auto w = [&](double y) { return radial_weight(*this, y); };
  return quad::half_line(w, r, 1e-13).value;
}

double LevyModel::psi_closed(double s) const {
  s = std::abs(s);
  if (const auto* p = std::get_if<PureStable>(&*profile_)) return std::pow(s, p->beta);
  if (const auto* p = std::get_if<RelativisticStable>(&*profile_)) {
    const double q = s / *kappa_;
    return p->m * std::expm1(0.5 * p->beta * std::log1p(q * q));
  }
  throw Error("psi_closed: model has no closed-form exponent");
}

std::complex<double> LevyModel::psi_complex(std::complex<double> z) const {
  const auto* p = std::get_if<RelativisticStable>(&*profile_);
  if (p == nullptr || closed_form_ != ClosedFormPsi::relativistic)
    throw Error("psi_complex: analytic continuation available for closed-form relativistic models only");
  const std::complex<double> q = z / *kappa_;
  return p->m * (std::pow(1.0 + q * q, 0.5 * p->beta) - 1.0);
}

double LevyModel::psi_interpolated(double s) const {
  std::call_once(table_->once, [&] { table_->table = std::make_unique<PsiTable>(*this); });
  return (*table_->table)(std::abs(s));
}

double LevyModel::psi_fast(double s) const {
  if (closed_form_ != ClosedFormPsi::none) return psi_closed(s);
  return psi_interpolated(s);
}

quad::Result levy_integrability(const LevyModel& m) {
  auto near = [&](double r) { return r < 1e-150 ? 0.0 : weighted(m, r * r, r); };
  auto far = [&](double r) { return radial_weight(m, r); };
  quad::Result total = quad::endpoint_singular(near, 0.0, 1.0, 1e-12);
  total += quad::half_line(far, 1.0, 1e-12);
  return total;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double nu_density(const LevyModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dim()) throw DomainError("nu_density: point has wrong dimension");
  const double r = norm(x);
  if (r == 0.0) throw DomainError("nu_density: density is singular at x = 0");
  return model.density(r);
}

PsiEvaluation psi_radial(const LevyModel& model, double s, PsiMethod method) {
  s = std::abs(s);
  PsiEvaluation out;
  if (s == 0.0) return out;
  const bool closed = model.closed_form() != ClosedFormPsi::none;
  if (method == PsiMethod::closed_form && !closed)
    throw Error("psi: closed form requested for a model without one");
  if (closed && method != PsiMethod::quadrature) {
    out.value = model.psi_closed(s);
    out.abs_error_estimate = 4.0 * std::numeric_limits<double>::epsilon() * out.value;
    out.method = PsiEvaluation::Method::closed_form;
    return out;
  }
  const quad::Result r = psi_by_quadrature(model, s);
  if (!r.converged || !std::isfinite(r.value))
    throw ConvergenceError("psi: quadrature did not converge", r.value, r.error);
  out.value = std::max(r.value, 0.0);
  out.abs_error_estimate = r.error;
  out.method = PsiEvaluation::Method::quadrature;
  return out;
}

PsiEvaluation psi(const LevyModel& model, std::span<const double> xi, PsiMethod method) {
  if (static_cast<int>(xi.size()) != model.dim()) throw DomainError("psi: point has wrong dimension");
  return psi_radial(model, norm(xi), method);
}

double psi_star(const LevyModel& model, double r) {
  if (r < 0.0) throw DomainError("psi_star: radius must be non-negative");
  if (r == 0.0) return 0.0;
  if (model.psi_monotone()) return model.psi_fast(r);
  double best = 0.0;
  for (int k = 1; k <= 64; ++k) best = std::max(best, model.psi_fast(r * k / 64.0));
  return best;
}

double psi_star_inv(const LevyModel& model, double s) {
  if (!(s > 0.0)) throw DomainError("psi_star_inv: level must be positive");
  double lo = 1.0, hi = 1.0;
  auto g = [&](double r) { return psi_star(model, r) - s; };
  int guard = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi))
      throw ConvergenceError("psi_star_inv: Psi* stays below the requested level", hi, 0.0);
  }
  while (g(lo) >= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  }
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (bracket.first + bracket.second);
}

ScalingCertificate estimate_lower_scaling(const LevyModel& model,
                                          std::span<const double> r_grid,
                                          std::span<const double> lambda_grid) {
  if (r_grid.empty() || lambda_grid.empty()) throw DomainError("estimate_lower_scaling: empty grid");
  double lambda_max = 1.0;
  for (double l : lambda_grid) {
    if (!(l >= 1.0)) throw DomainError("estimate_lower_scaling: lambda must be >= 1");
    lambda_max = std::max(lambda_max, l);
  }
  const double lambda_half = std::sqrt(lambda_max);

  struct Pair {
    double log_ratio;  // log Psi*(lambda r) - log Psi*(r)
    double log_lambda;
    bool inner;
  };
  std::vector<Pair> pairs;
  for (double r : r_grid) {
    const double base = psi_star(model, r);
    if (!(base > 0.0)) continue;
    for (double l : lambda_grid) {
      pairs.push_back({std::log(psi_star(model, l * r)) - std::log(base), std::log(l), l <= lambda_half * (1 + 1e-12)});
    }
  }
  ScalingCertificate best{0.0, 0.05, true};
  for (int k = 1; k <= 40; ++k) {
    const double alpha = 0.05 * k;
    double min_full = std::numeric_limits<double>::infinity();
    double min_inner = std::numeric_limits<double>::infinity();
    for (const Pair& p : pairs) {
      const double v = p.log_ratio - alpha * p.log_lambda;
      min_full = std::min(min_full, v);
      if (p.inner) min_inner = std::min(min_inner, v);
    }
    const double c2 = std::exp(min_full);
    if (c2 > 0.0 && min_full - min_inner >= std::log(0.9)) {
      best = {std::min(c2, 1.0), alpha, false};
    }
  }
  if (best.degenerate) {
    double min_full = std::numeric_limits<double>::infinity();
    for (const Pair& p : pairs) min_full = std::min(min_full, p.log_ratio - 0.05 * p.log_lambda);
    best.c2 = std::min(1.0, std::exp(min_full));
  }
  return best;
}

double small_scale_constant(const LevyModel& model, const ScalingCertificate& cert) {
  return std::pow(cert.c2, -1.0 / cert.alpha) / psi_star_inv(model, 1.0);
}

}  // namespace levyk
