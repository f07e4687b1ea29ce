#include "levyk/exp_moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "levyk/errors.hpp"

namespace levyk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceCap = 1e12;

enum class Kernel { cosh_minus_one, cosh, derivative };

double log_weight(const LevyModel& m, double r) {
  return std::log(sphere_area(m.dim())) + (m.dim() - 1) * std::log(r) + m.log_density(r);
}

double log_weight_tilted(const LevyModel& m, double r) {
  return std::log(sphere_area(m.dim())) + (m.dim() - 1) * std::log(r) + m.log_density_tilted(r);
}

// Integrand k(s r) w(r). Where the hyperbolic factor is large the exponential
// parts e^{sr} and e^{-kappa r} are combined before exponentiating.
double integrand(const LevyModel& m, Kernel kernel, double s, double r) {
  if (r < 1e-150) return 0.0;
  const int d = m.dim();
  const double z = s * r;
  const bool tilted = z >= 20.0 && m.kappa().has_value();
  const double drift = tilted ? (s - *m.kappa()) * r : 0.0;
  switch (kernel) {
    case Kernel::cosh_minus_one:
      if (z < 20.0) {
        const double k = radial::cosh_mean_minus_one(d, z);
        return k == 0.0 ? 0.0 : std::exp(std::log(k) + log_weight(m, r));
      }
      if (tilted)
        return std::exp(radial::log_cosh_mean_scaled(d, z) + log_weight_tilted(m, r) + drift) -
               std::exp(log_weight(m, r));
      return std::exp(radial::log_cosh_mean(d, z) + log_weight(m, r)) - std::exp(log_weight(m, r));
    case Kernel::cosh:
      if (tilted) return std::exp(radial::log_cosh_mean_scaled(d, z) + log_weight_tilted(m, r) + drift);
      return std::exp(radial::log_cosh_mean(d, z) + log_weight(m, r));
    case Kernel::derivative:
      if (z == 0.0) return 0.0;
      if (tilted)
        return std::exp(std::log(r) + radial::log_cosh_mean_derivative_scaled(d, z) +
                        log_weight_tilted(m, r) + drift);
      return std::exp(std::log(r) + radial::log_cosh_mean_derivative(d, z) + log_weight(m, r));
  }
  return 0.0;
}

OmegaEvaluation diverged() { return {kInf, 0.0, true}; }

// int_lo^hi k(s r) w(r) dr, hi possibly infinite. The unbounded part is
// integrated over doubling ranges; divergence is declared when the partial
// integral passes 1e12 or, for s >= kappa, three consecutive doublings fail
// to shrink the pieces. Below kappa the pieces may grow for a while before
// the factor e^{-(kappa - s) r} takes over, so there the rule does not apply.
// Slowly converging algebraic tails are closed by Aitken extrapolation of the
// partial sums.
OmegaEvaluation radial_integral(const LevyModel& m, Kernel kernel, double s, double lo, double hi) {
  auto f = [&](double r) { return integrand(m, kernel, s, r); };
  quad::Options opt;
  opt.rel_tol = 1e-13;
  quad::Result total;
  if (lo < 1.0) {
    const double b = std::min(1.0, hi);
    total += lo == 0.0 ? quad::endpoint_singular(f, 0.0, b, 1e-14) : quad::adaptive(f, lo, b, opt);
    lo = b;
  }
  if (lo >= hi) {
    return {total.value, total.error, false};
  }
  if (std::isfinite(hi)) {
    for (double a = lo; a < hi;) {
      const double b = std::min(hi, 2.0 * a);
      total += quad::adaptive(f, a, b, opt);
      a = b;
    }
    if (!std::isfinite(total.value) || total.value > kDivergenceCap) return diverged();
    if (!total.converged) throw ConvergenceError("omega: quadrature did not converge", total.value, total.error);
    return {total.value, total.error, false};
  }

  const bool inside = m.kappa() && s < *m.kappa();
  std::vector<double> sums;
  double previous_piece = 0.0;
  int non_shrinking = 0;
  double a = lo;
  for (int k = 0; k < 48; ++k) {
    const double b = 2.0 * a;
    const quad::Result piece = quad::adaptive(f, a, b, opt);
    total += piece;
    a = b;
    if (!std::isfinite(total.value) || total.value > kDivergenceCap) return diverged();
    if (!inside && k > 0 && piece.value >= (1.0 - 1e-3) * previous_piece && piece.value > 1e-300) {
      if (++non_shrinking >= 3) return diverged();
    } else {
      non_shrinking = 0;
    }
    previous_piece = piece.value;
    sums.push_back(total.value);
    if (piece.value <= 1e-17 * std::abs(total.value)) {
      return {total.value, total.error, false};
    }
  }
  // Algebraic tail: pieces shrink geometrically in the doubling index.
  const std::size_t n = sums.size();
  const double s0 = sums[n - 3], s1 = sums[n - 2], s2 = sums[n - 1];
  const double denom = (s2 - s1) - (s1 - s0);
  if (denom >= 0.0) return diverged();
  const double limit = s2 - (s2 - s1) * (s2 - s1) / denom;
  const double t0 = sums[n - 4];
  const double denom_prev = (s1 - s0) - (s0 - t0);
  const double limit_prev = denom_prev < 0.0 ? s1 - (s1 - s0) * (s1 - s0) / denom_prev : limit;
  return {limit, total.error + std::abs(limit - limit_prev), false};
}

bool subexponential(const LevyModel& m) { return !m.kappa().has_value(); }

double closed_omega(const LevyModel& m, double s) {
  const auto& p = std::get<RelativisticStable>(m.profile());
  const double kappa = *m.kappa();
  if (s > kappa) return kInf;
  const double q = s / kappa;
  return -p.m * std::expm1(0.5 * p.beta * std::log1p(-q * q));
}

double closed_omega_prime(const LevyModel& m, double s) {
  const auto& p = std::get<RelativisticStable>(m.profile());
  const double kappa = *m.kappa();
  if (s >= kappa) return kInf;
  return p.beta * s * std::pow(kappa * kappa - s * s, 0.5 * p.beta - 1.0);
}

bool use_closed(const LevyModel& m, OmegaMethod method) {
  const bool available = m.closed_form() == ClosedFormPsi::relativistic;
  if (method == OmegaMethod::closed_form && !available)
    throw Error("omega: closed form requested for a model without one");
  return available && method != OmegaMethod::quadrature;
}

void check_unit(std::span<const double> theta, int dim) {
  if (static_cast<int>(theta.size()) != dim) throw DomainError("direction has wrong dimension");
  if (std::abs(norm(theta) - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
}

}  // namespace

double require_kappa(const LevyModel& model) {
  if (!model.kappa())
    throw UnsupportedProfile(std::string("profile '") + profile_kind_name(model.profile()) +
                             "' is subexponential: exponential-rate quantities are undefined");
  return *model.kappa();
}

OmegaEvaluation omega_radial(const LevyModel& model, double s, OmegaMethod method) {
  s = std::abs(s);
  if (s == 0.0) return {};
  const double kappa = require_kappa(model);
  if (s > kappa) return diverged();
  if (use_closed(model, method)) {
    const double v = closed_omega(model, s);
    return {v, 4.0 * std::numeric_limits<double>::epsilon() * v, false};
  }
  return radial_integral(model, Kernel::cosh_minus_one, s, 0.0, kInf);
}

OmegaEvaluation omega(const LevyModel& model, std::span<const double> xi, OmegaMethod method) {
  if (static_cast<int>(xi.size()) != model.dim()) throw DomainError("omega: point has wrong dimension");
  return omega_radial(model, norm(xi), method);
}

OmegaEvaluation omega_restricted(const LevyModel& model, std::span<const double> xi, double r,
                                 Side side) {
  if (!(r > 0.0)) throw DomainError("omega_restricted: radius must be positive");
  if (static_cast<int>(xi.size()) != model.dim()) throw DomainError("omega_restricted: point has wrong dimension");
  const double s = norm(xi);
  if (s == 0.0) return {};
  if (side == Side::small) return radial_integral(model, Kernel::cosh_minus_one, s, 0.0, r);
  const double kappa = require_kappa(model);
  if (s > kappa) return diverged();
  return radial_integral(model, Kernel::cosh_minus_one, s, r, kInf);
}

OmegaEvaluation omega_prime(const LevyModel& model, double s, std::span<const double> theta,
                            OmegaMethod method) {
  check_unit(theta, model.dim());
  const double kappa = require_kappa(model);
  if (!(s > 0.0 && s < kappa)) throw DomainError("omega_prime: s must lie in (0, kappa)");
  if (use_closed(model, method)) {
    const double v = closed_omega_prime(model, s);
    return {v, 8.0 * std::numeric_limits<double>::epsilon() * v, !std::isfinite(v)};
  }
  return radial_integral(model, Kernel::derivative, s, 0.0, kInf);
}

double omega_star(const LevyModel& model, OmegaMethod method) {
  const double kappa = require_kappa(model);
  return omega_radial(model, kappa, method).value;
}

double gamma_alpha(const LevyModel& model, double alpha, std::span<const double> theta,
                   OmegaMethod method) {
  check_unit(theta, model.dim());
  if (!(alpha > 0.0)) throw DomainError("gamma_alpha: alpha must be positive");
  const double kappa = require_kappa(model);
  const double threshold = omega_radial(model, kappa, method).value;
  if (alpha >= threshold) return kappa;
  auto g = [&](double s) { return omega_radial(model, s, method).value - alpha; };
  double lo = 0.0, g_lo = -alpha, hi = kappa, g_hi = threshold - alpha;
  if (!std::isfinite(g_hi)) {
    // omega diverges at kappa: step towards kappa until it exceeds alpha.
    bool found = false;
    for (int k = 1; k <= 60 && !found; ++k) {
      const double s = kappa * (1.0 - std::ldexp(1.0, -k));
      const double v = g(s);
      if (v >= 0.0 && std::isfinite(v)) {
        hi = s;
        g_hi = v;
        found = true;
      } else {
        lo = s;
        g_lo = v;
      }
    }
    if (!found) throw ConvergenceError("gamma_alpha: no finite bracket below kappa", lo, 0.0);
  }
  boost::uintmax_t iters = 300;
  const auto bracket = boost::math::tools::toms748_solve(
      g, lo, hi, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (bracket.first + bracket.second);
}

OmegaEvaluation exp_moment(const LevyModel& model, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != model.dim()) throw DomainError("exp_moment: point has wrong dimension");
  const double s = norm(xi);
  if (s > 0.0) {
    if (subexponential(model) || s > *model.kappa()) return diverged();
  }
  return radial_integral(model, Kernel::cosh, s, 1.0, kInf);
}

DecayRateCurve decay_rate_curve(const LevyModel& model, std::span<const double> alphas,
                                std::span<const double> theta) {
  DecayRateCurve curve;
  curve.kappa = require_kappa(model);
  curve.theta.assign(theta.begin(), theta.end());
  curve.omega_star_kappa = omega_star(model);
  for (double a : alphas) {
    curve.alphas.push_back(a);
    curve.rates.push_back(gamma_alpha(model, a, theta));
  }
  return curve;
}

}  // namespace levyk
