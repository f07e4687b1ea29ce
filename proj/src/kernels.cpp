#include "levyk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/format.hpp"
#include "levyk/parallel.hpp"

namespace levyk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUnderflow = 1e-280;
constexpr double kSmallTimeCutoff = 1e7;

struct PointValue {
  double value = 0.0;
  double error = 0.0;
  unsigned flags = 0;
};

double spectral_factor(int dim) { return sphere_area(dim) / std::pow(2.0 * kPi, dim); }

// Combines exp(log_factor) * integral into a flagged point value.
PointValue finish(const quad::Result& r, double log_factor) {
  PointValue p;
  const double factor = std::exp(log_factor);
  p.error = r.error * factor;
  if (!(r.value > 0.0)) {
    p.flags |= kernel_flag::clamped;
    if (-r.value > r.error || !r.converged) p.flags |= kernel_flag::nonconverged;
    return p;
  }
  const double log_value = std::log(r.value) + log_factor;
  if (log_value < std::log(kUnderflow)) {
    p.flags |= kernel_flag::underflow;
    p.error = 0.0;
    return p;
  }
  p.value = std::exp(log_value);
  if (!r.converged && p.error > 1e-2 * p.value) p.flags |= kernel_flag::nonconverged;
  return p;
}

const RelativisticStable* relativistic(const LevyModel& m) {
  if (!m.has_complex_psi()) return nullptr;
  return std::get_if<RelativisticStable>(&m.profile());
}

// ---------------------------------------------------------------------------
// Heat kernel
// ---------------------------------------------------------------------------

class HeatEvaluator {
 public:
  HeatEvaluator(const LevyModel& m, double t, const HeatOptions& opt) : m_(m), t_(t), opt_(opt) {
    if (!(t > 0.0)) throw DomainError("heat kernel: t must be positive");
    if (!(opt.tol > 0.0 && opt.tol < 1.0) || !(opt.safety >= 1.0))
      throw DomainError("heat kernel: invalid cutoff options");
    log_tol_ = std::log(1.0 / opt.tol);
    cutoff_ = opt.safety * psi_star_inv(m, log_tol_ / t);
    if (t * psi_star(m, cutoff_) < log_tol_)
      throw ConvergenceError("heat kernel: e^{-t Psi} exceeds the tolerance at the frequency cutoff",
                             0.0, 0.0);
    p0_ = compute_zero();
  }

  double zero() const { return p0_; }
  double cutoff() const { return cutoff_; }

  PointValue at(double x) const {
    x = std::abs(x);
    if (x == 0.0) return {p0_, 1e-14 * p0_, 0};
    if (opt_.allow_small_time && cutoff_ > kSmallTimeCutoff && x >= 0.5)
      return {t_ * m_.density(x), 0.0, kernel_flag::small_time};
    if (m_.dim() != 1) return radial(x);
    if (opt_.allow_tilt && relativistic(m_) != nullptr) {
      const double s = tilt(x);
      if (s * x > 1.0) return tilted(x, s);
    }
    return plain(x);
  }

 private:
  double envelope(double xi) const { return std::exp(-t_ * m_.psi_fast(xi)); }

  quad::Options panel_options(double scale) const {
    quad::Options o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-18 * scale;
    return o;
  }

  double compute_zero() const {
    const int d = m_.dim();
    auto f = [&](double rho) { return std::pow(rho, d - 1) * envelope(rho); };
    quad::Options o;
    o.rel_tol = 1e-14;
    double a = cutoff_ * std::ldexp(1.0, -48);
    quad::Result total = quad::adaptive(f, 0.0, a, o);
    while (a < cutoff_) {
      const double b = std::min(2.0 * a, cutoff_);
      total += quad::adaptive(f, a, b, o);
      a = b;
      if (m_.psi_monotone() && f(b) * (cutoff_ - b) < 1e-18 * total.value) break;
    }
    return spectral_factor(d) * total.value;
  }

  // Integrates f over [0, end) in panels [(k - 1/2) w, (k + 1/2) w], stopping
  // once the envelope bound on the remainder is negligible.
  template <class F, class Env>
  quad::Result panels(const F& f, const Env& env, double w, double end, double scale) const {
    const quad::Options o = panel_options(scale);
    quad::Result acc;
    for (int k = 0;; ++k) {
      const double a = k == 0 ? 0.0 : (k - 0.5) * w;
      if (a >= end) break;
      const double b = std::min((k + 0.5) * w, end);
      acc += quad::adaptive(f, a, b, o);
      if (m_.psi_monotone() && env(b) * (end - b) < 1e-18 * scale) break;
    }
    acc.error += 4.0 * kEps * acc.l1;
    return acc;
  }

  PointValue plain(double x) const {
    const double w = std::min(kPi / x, cutoff_ / 16.0);
    auto f = [&](double xi) { return envelope(xi) * std::cos(x * xi); };
    auto env = [&](double xi) { return envelope(xi); };
    return finish(panels(f, env, w, cutoff_, kPi * p0_), -std::log(kPi));
  }

  PointValue radial(double r) const {
    const int d = m_.dim();
    const double w = std::min(kPi / r, cutoff_ / 16.0);
    auto f = [&](double rho) {
      return std::pow(rho, d - 1) * envelope(rho) * radial::cos_mean(d, r * rho);
    };
    auto env = [&](double rho) { return std::pow(rho, d - 1) * envelope(rho); };
    const double scale = p0_ / spectral_factor(d);
    return finish(panels(f, env, w, cutoff_, scale), std::log(spectral_factor(d)));
  }

  // Saddle of -x s + t omega(s), kept a distance 1/x inside the branch point.
  double tilt(double x) const {
    const auto& p = *relativistic(m_);
    const double kappa = *m_.kappa();
    const double target = x / t_;
    auto g = [&](double s) {
      return p.beta * s * std::pow(kappa * kappa - s * s, 0.5 * p.beta - 1.0) - target;
    };
    const double hi = kappa * (1.0 - 1e-12);
    double saddle = hi;
    if (g(hi) > 0.0) {
      boost::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(g, 0.0, hi, -target, g(hi),
                                                        boost::math::tools::eps_tolerance<double>(40), iters);
      saddle = 0.5 * (br.first + br.second);
    }
    return std::max(0.0, std::min(saddle, kappa - 1.0 / x));
  }

  // p_t(x) = e^{-xs} (1/pi) int_0^inf Re(e^{-ixu} e^{-t Psi(u - is)}) du.
  PointValue tilted(double x, double s) const {
    const std::complex<double> shift(0.0, -s);
    auto f = [&](double u) {
      const std::complex<double> e = std::complex<double>(0.0, -x * u) - t_ * m_.psi_complex(u + shift);
      return std::exp(e.real()) * std::cos(e.imag());
    };
    auto env = [&](double u) { return std::exp(-t_ * m_.psi_complex(u + shift).real()); };
    const double end = cutoff_ + 4.0 * *m_.kappa();
    const double scale = env(0.0) * std::min(kPi / x, end);
    return finish(panels(f, env, kPi / x, end, scale), -x * s - std::log(kPi));
  }

  const LevyModel& m_;
  double t_;
  HeatOptions opt_;
  double log_tol_ = 0.0;
  double cutoff_ = 0.0;
  double p0_ = 0.0;
};

// ---------------------------------------------------------------------------
// Resolvent, frequency domain
// ---------------------------------------------------------------------------

class ResolventEvaluator {
 public:
  ResolventEvaluator(const LevyModel& m, double alpha) : m_(m), alpha_(alpha) {
    if (!(alpha > 0.0)) throw DomainError("resolvent: alpha must be positive");
    if (m.dim() != 1)
      throw NonIntegrableSymbol("resolvent_freq: 1/(alpha + Psi) is not integrable for d >= 2; use resolvent_time");
    bulk_ = std::max(1.0, psi_star_inv(m, 20.0 * alpha));
    if (const auto* p = relativistic(m)) {
      const double kappa = *m.kappa();
      gamma_ = alpha >= p->m ? kappa
                             : std::sqrt(kappa * kappa - std::pow(p->m - alpha, 2.0 / p->beta));
      bulk_ = std::max(bulk_, 10.0 * kappa);
    }
  }

  double symbol(double xi) const { return 1.0 / (alpha_ + m_.psi_fast(xi)); }

  PointValue at(double x) const {
    x = std::abs(x);
    if (x == 0.0) return zero();
    double s = gamma_ > 0.0 ? gamma_ - 1.0 / x : 0.0;
    if (s * x <= 1.0) s = 0.0;
    const double w = kPi / x;
    const int min_panels = acceleration_start(w);
    const quad::Options o = options(w);
    quad::Result r;
    if (s > 0.0) {
      const std::complex<double> shift(0.0, -s);
      auto f = [&](double u) {
        return (std::polar(1.0, -x * u) / (alpha_ + m_.psi_complex(u + shift))).real();
      };
      r = quad::alternating_panel_sum([&](int k) { return quad::adaptive(f, k * w, (k + 1) * w, o); },
                                      min_panels);
    } else {
      auto f = [&](double xi) { return std::cos(x * xi) * symbol(xi); };
      r = quad::alternating_panel_sum(
          [&](int k) { return quad::adaptive(f, k == 0 ? 0.0 : (k - 0.5) * w, (k + 0.5) * w, o); },
          min_panels);
    }
    return finish(r, -x * s - std::log(kPi));
  }

  // int_0^b g = (1/pi) int_0^inf G(xi) sin(b xi)/xi dxi.
  quad::Result cumulative(double b) const {
    if (!(b > 0.0)) throw DomainError("resolvent_cumulative: b must be positive");
    const double w = kPi / b;
    const int min_panels = acceleration_start(w);
    const quad::Options o = options(w);
    auto f = [&](double xi) { return xi == 0.0 ? b * symbol(0.0) : std::sin(b * xi) / xi * symbol(xi); };
    quad::Result r = quad::alternating_panel_sum(
        [&](int k) { return quad::adaptive(f, k * w, (k + 1) * w, o); }, min_panels);
    r.value /= kPi;
    r.error /= kPi;
    return r;
  }

 private:
  // Panels summed directly before acceleration: enough to pass the bulk of the
  // symbol, but never more than 64 since the panel amplitudes are smooth once
  // the panels are narrow compared with the distance from the origin.
  int acceleration_start(double w) const {
    return std::clamp(static_cast<int>(std::ceil(bulk_ / w)), 10, 64);
  }

  quad::Options options(double w) const {
    quad::Options o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-18 * w / alpha_;
    return o;
  }

  PointValue zero() const {
    const double q = std::log(m_.psi_fast(2e6) / m_.psi_fast(1e6)) / std::log(2.0);
    if (q <= 1.0 + 1e-3)
      return {std::numeric_limits<double>::infinity(), 0.0, kernel_flag::singular};
    auto f = [&](double xi) { return symbol(xi); };
    quad::Result r = quad::adaptive(f, 0.0, bulk_, options(bulk_));
    r += quad::half_line(f, bulk_, 1e-12);
    return finish(r, -std::log(kPi));
  }

  const LevyModel& m_;
  double alpha_;
  double bulk_ = 1.0;
  double gamma_ = 0.0;
};

KernelGrid make_grid(KernelKind kind, double parameter, const LevyModel& m, KernelMethod method,
                     std::span<const double> points) {
  KernelGrid g;
  g.kind = kind;
  g.parameter = parameter;
  g.dim = m.dim();
  g.method = method;
  g.points.assign(points.begin(), points.end());
  g.values.assign(points.size(), 0.0);
  g.errors.assign(points.size(), 0.0);
  g.flags.assign(points.size(), 0u);
  return g;
}

void check_points(const LevyModel& m, std::span<const double> points) {
  for (double x : points) {
    if (!std::isfinite(x)) throw DomainError("kernel: points must be finite");
    if (m.dim() > 1 && x < 0.0) throw DomainError("kernel: radial points must be non-negative");
  }
}

// Local power-law tail int_x1^inf A x^{-q} from two samples; +inf when q <= 1.
double power_tail(double x0, double f0, double x1, double f1) {
  if (!(f1 > 0.0)) return 0.0;
  if (!(f0 > 0.0)) return 0.0;
  const double q = std::log(f0 / f1) / std::log(x1 / x0);
  if (q <= 1.0) return std::numeric_limits<double>::infinity();
  return f1 * x1 / (q - 1.0);
}

}  // namespace

std::string kernel_flag_names(unsigned flags) {
  static constexpr std::pair<unsigned, const char*> kNames[] = {
      {kernel_flag::underflow, "underflow"},   {kernel_flag::small_time, "small_time"},
      {kernel_flag::clamped, "clamped"},       {kernel_flag::nonconverged, "nonconverged"},
      {kernel_flag::singular, "singular"},
  };
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

void KernelGrid::write_csv(std::ostream& out) const {
  out << "x,value,abs_error,flags\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << fmt17(points[i]) << ',' << fmt17(values[i]) << ',' << fmt17(errors[i]) << ','
        << kernel_flag_names(flags[i]) << '\n';
  }
}

KernelGrid heat_kernel(const LevyModel& model, double t, std::span<const double> points,
                       const HeatOptions& opt) {
  check_points(model, points);
  const HeatEvaluator ev(model, t, opt);
  KernelGrid g = make_grid(KernelKind::heat, t, model,
                           model.dim() == 1 ? KernelMethod::fourier_1d : KernelMethod::hankel_radial,
                           points);
  parallel_for(points.size(), [&](std::size_t i) {
    const PointValue p = ev.at(points[i]);
    g.values[i] = p.value;
    g.errors[i] = p.error;
    g.flags[i] = p.flags;
  });
  return g;
}

double heat_kernel_zero(const LevyModel& model, double t, const HeatOptions& opt) {
  return HeatEvaluator(model, t, opt).zero();
}

KernelGrid resolvent_freq(const LevyModel& model, double alpha, std::span<const double> points) {
  check_points(model, points);
  const ResolventEvaluator ev(model, alpha);
  KernelGrid g = make_grid(KernelKind::resolvent, alpha, model, KernelMethod::fourier_1d, points);
  parallel_for(points.size(), [&](std::size_t i) {
    const PointValue p = ev.at(points[i]);
    g.values[i] = p.value;
    g.errors[i] = p.error;
    g.flags[i] = p.flags;
  });
  return g;
}

double resolvent_cumulative(const LevyModel& model, double alpha, double b) {
  return ResolventEvaluator(model, alpha).cumulative(b).value;
}

// Trapezoid in u = log t on the lattice u_j = j h. Below the first heat node
// t_1 (0.02 for |x| >= 1) the integrand is continued by the small-time model
// p_t(x) = t nu(x)(1 + c t), c matched at t_1; at x = 0 by a power law
// A t^{-q} fitted to the first two nodes.
KernelGrid resolvent_time(const LevyModel& model, double alpha, std::span<const double> points) {
  if (!(alpha > 0.0)) throw DomainError("resolvent: alpha must be positive");
  check_points(model, points);
  constexpr double h = 0.25;
  const std::size_t n = points.size();
  KernelGrid g = make_grid(KernelKind::resolvent, alpha, model, KernelMethod::time_quadrature, points);
  if (n == 0) return g;

  std::vector<int> j0(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::abs(points[i]);
    const double t1 = x == 0.0 ? 1e-4 : 0.02 * std::pow(std::min(1.0, x), 2);
    j0[i] = static_cast<int>(std::floor(std::log(t1) / h));
  }
  const int j_min = *std::min_element(j0.begin(), j0.end());
  const int j_max = static_cast<int>(std::ceil(std::log(50.0 / alpha) / h));

  std::vector<double> sum_h(n, 0.0), sum_2h(n, 0.0), err(n, 0.0), first(n, 0.0), second(n, 0.0);
  std::vector<unsigned> flags(n, 0u);
  for (int j = j_min; j <= std::max(j_max, j_min + 8); ++j) {
    std::vector<std::size_t> idx;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
      if (j >= j0[i]) {
        idx.push_back(i);
        xs.push_back(points[i]);
      }
    }
    const double t = std::exp(j * h);
    const KernelGrid heat = heat_kernel(model, t, xs);
    const double weight = t * std::exp(-alpha * t);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      const double term = weight * heat.values[k];
      sum_h[i] += term;
      if (j % 2 == 0) sum_2h[i] += term;
      err[i] += weight * heat.errors[k];
      flags[i] |= heat.flags[k] & ~kernel_flag::small_time;
      if (j == j0[i]) first[i] = heat.values[k];
      if (j == j0[i] + 1) second[i] = heat.values[k];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::abs(points[i]);
    const double t1 = std::exp(j0[i] * h);
    std::function<double(double)> model_p;
    if (x == 0.0) {
      const double q = std::log(first[i] / second[i]) / h;
      if (!(q < 1.0)) {
        g.values[i] = std::numeric_limits<double>::infinity();
        g.flags[i] = kernel_flag::singular;
        continue;
      }
      const double a = first[i] * std::pow(t1, q);
      model_p = [a, q](double t) { return a * std::pow(t, -q); };
    } else {
      const double nu = model.density(x);
      const double c = (first[i] / (t1 * nu) - 1.0) / t1;
      model_p = [nu, c](double t) { return t * nu * (1.0 + c * t); };
    }
    double extension_h = 0.0, extension_2h = 0.0;
    for (int j = j0[i] - 1;; --j) {
      const double t = std::exp(j * h);
      const double term = t * std::exp(-alpha * t) * model_p(t);
      extension_h += term;
      if (j % 2 == 0) extension_2h += term;
      if (term < 1e-22 * (sum_h[i] + extension_h) || j < j0[i] - 4000) break;
    }
    const double value = h * (sum_h[i] + extension_h);
    const double coarse = 2.0 * h * (sum_2h[i] + extension_2h);
    g.values[i] = value;
    g.errors[i] = std::abs(value - coarse) + h * err[i] + 1e-3 * h * extension_h;
    g.flags[i] = flags[i];
    if (value < kUnderflow) {
      g.values[i] = 0.0;
      g.flags[i] |= kernel_flag::underflow;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Normalization, semigroup and bound audits
// ---------------------------------------------------------------------------

namespace {

// Composite Gauss-Kronrod over [a, b] in pieces of the given width, stopping
// once a piece and the integrand at its right end are negligible.
template <class F>
quad::Result outward_integral(const F& f, double a, double b, double width) {
  quad::Result total;
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, lo + width);
    const quad::Result piece = quad::gk_panel(f, lo, hi);
    total += piece;
    lo = hi;
    if (std::abs(piece.value) < 1e-18 * std::abs(total.value) && std::abs(f(hi)) < 1e-18 * std::abs(total.value))
      break;
  }
  return total;
}

}  // namespace

MassReport heat_mass(const LevyModel& model, double t) {
  if (model.dim() != 1) throw DomainError("heat_mass: only d = 1 is supported");
  const HeatEvaluator ev(model, t, {});
  const double c = 1.0 / psi_star_inv(model, 1.0 / t);
  const double v_end = std::asinh(1e3);
  auto f = [&](double v) { return ev.at(c * std::sinh(v)).value * c * std::cosh(v); };
  const quad::Result grid = outward_integral(f, 0.0, v_end, 0.25);
  const double x2 = c * std::sinh(v_end - 0.5), x1 = c * std::sinh(v_end - 0.25), x0 = c * std::sinh(v_end);
  const double p2 = ev.at(x2).value, p1 = ev.at(x1).value, p0 = ev.at(x0).value;
  const double tail = power_tail(x1, p1, x0, p0);
  const double tail_alt = power_tail(x2, p2, x1, p1) * (p1 > 0.0 ? p0 * x0 / (p1 * x1) : 0.0);
  MassReport rep;
  rep.grid_part = 2.0 * grid.value;
  rep.tail_part = 2.0 * tail;
  rep.mass = rep.grid_part + rep.tail_part;
  rep.error = 2.0 * (grid.error + std::abs(tail - tail_alt));
  return rep;
}

MassReport resolvent_mass(const LevyModel& model, double alpha) {
  const ResolventEvaluator ev(model, alpha);
  const double c = 1.0 / psi_star_inv(model, alpha);
  const double x_near = c;
  const double x_far = 1e3 * c;
  const quad::Result near = ev.cumulative(x_near);
  auto f = [&](double v) {
    const double x = std::exp(v);
    return ev.at(x).value * x;
  };
  const double v0 = std::log(x_near), v1 = std::log(x_far);
  const quad::Result far = outward_integral(f, v0, v1, 0.5);
  const double x2 = std::exp(v1 - 0.5), xa = std::exp(v1 - 0.25);
  const double g2 = ev.at(x2).value, g1 = ev.at(xa).value, g0 = ev.at(x_far).value;
  const double tail = power_tail(xa, g1, x_far, g0);
  const double tail_alt = power_tail(x2, g2, xa, g1) * (g1 > 0.0 ? g0 * x_far / (g1 * xa) : 0.0);
  MassReport rep;
  rep.grid_part = 2.0 * (near.value + far.value);
  rep.tail_part = 2.0 * tail;
  rep.mass = rep.grid_part + rep.tail_part;
  rep.error = 2.0 * (near.error + far.error + std::abs(tail - tail_alt));
  return rep;
}

SemigroupReport semigroup_check(const LevyModel& model, double t, double x_max, double h,
                                double half_width) {
  if (model.dim() != 1) throw DomainError("semigroup_check: only d = 1 is supported");
  if (!(h > 0.0 && x_max >= 0.0 && half_width > x_max))
    throw DomainError("semigroup_check: invalid grid");
  const long n = std::lround(half_width / h);
  const long m = std::lround(x_max / h);
  const HeatEvaluator ev(model, t, {});
  const HeatEvaluator ev2(model, 2.0 * t, {});
  std::vector<double> p(static_cast<std::size_t>(n + m + 1));
  parallel_for(p.size(), [&](std::size_t k) { p[k] = ev.at(static_cast<double>(k) * h).value; });
  SemigroupReport rep;
  for (long i = -m; i <= m; ++i) {
    double conv = 0.0;
    for (long k = -n; k <= n; ++k) {
      const double w = (k == -n || k == n) ? 0.5 : 1.0;
      conv += w * p[static_cast<std::size_t>(std::labs(i - k))] * p[static_cast<std::size_t>(std::labs(k))];
    }
    conv *= h;
    const double direct = ev2.at(static_cast<double>(i) * h).value;
    const double rel = std::abs(conv - direct) / direct;
    if (rel > rep.sup_relative) {
      rep.sup_relative = rel;
      rep.argmax = static_cast<double>(i) * h;
    }
  }
  return rep;
}

double l1_constant(const LevyModel& model, std::span<const double> t_grid) {
  double best = 0.0;
  const int d = model.dim();
  for (double t : t_grid) {
    const double lhs = heat_kernel_zero(model, t) * std::pow(2.0 * kPi, d);
    best = std::max(best, lhs / std::pow(psi_star_inv(model, 1.0 / t), d));
  }
  return best;
}

ExpBoundReport exp_upper_bound_check(const LevyModel& model, double t, std::span<const double> xi0,
                                     std::span<const double> points, double tolerance) {
  if (static_cast<int>(xi0.size()) != model.dim())
    throw DomainError("exp_upper_bound_check: xi0 has wrong dimension");
  const OmegaEvaluation moment = exp_moment(model, xi0);
  if (moment.diverged) throw DomainError("exp_upper_bound_check: exponential moment at xi0 is infinite");
  ExpBoundReport rep;
  rep.omega_xi0 = norm(xi0) == 0.0 ? 0.0 : omega(model, xi0).value;
  rep.p0 = heat_kernel_zero(model, t);
  const KernelGrid grid = heat_kernel(model, t, points);
  rep.points = grid.points;
  rep.kernel = grid.values;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double b = rep.p0 * std::exp(-xi0[0] * grid.points[i] + t * rep.omega_xi0);
    rep.bound.push_back(b);
    const double v = grid.values[i] - b;
    rep.max_violation = std::max(rep.max_violation, v);
    if (v > tolerance) ++rep.violations;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Jump decomposition
// ---------------------------------------------------------------------------

namespace {

// Psi_r(xi) = 2 int_0^r (1 - cos(xi y)) nu(y) dy.
double psi_small_jumps(const LevyModel& m, double r, double xi) {
  if (xi == 0.0) return 0.0;
  auto f = [&](double y) {
    if (y < 1e-150) return 0.0;
    const double s = std::sin(0.5 * xi * y);
    if (s == 0.0) return 0.0;
    return 4.0 * std::exp(2.0 * std::log(std::abs(s)) + m.log_density(y));
  };
  const double split = std::min(r, kPi / xi);
  quad::Result total = quad::endpoint_singular(f, 0.0, split, 1e-14);
  if (split < r) {
    quad::Options o;
    o.rel_tol = 1e-13;
    total += quad::adaptive(f, split, r, o);
  }
  return total.value;
}

// Linear convolution of two length-n vectors via zero-padded FFT, cropped to
// the central n entries.
void convolve_central(Eigen::FFT<double>& fft, const std::vector<std::complex<double>>& kernel_hat,
                        std::vector<double>& v, std::size_t padded) {
  const std::size_t n = v.size();
  std::vector<double> buf(padded, 0.0);
  std::copy(v.begin(), v.end(), buf.begin());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= kernel_hat[k];
  std::vector<double> full;
  fft.inv(full, spec);
  const std::size_t offset = (n - 1) / 2;
  for (std::size_t k = 0; k < n; ++k) v[k] = full[k + offset];
}

}  // namespace

JumpDecomposition jump_decomposition(const LevyModel& model, double r, double t,
                                     std::span<const double> points, int n_terms,
                                     const JumpOptions& opt) {
  if (model.dim() != 1) throw DomainError("jump_decomposition: only d = 1 is supported");
  if (!(r >= 1.0)) throw DomainError("jump_decomposition: r must be >= 1");
  if (!(t > 0.0)) throw DomainError("jump_decomposition: t must be positive");
  if (n_terms < 1) throw DomainError("jump_decomposition: n_terms must be >= 1");
  if (!(opt.h > 0.0 && opt.half_width > 2.0 * r)) throw DomainError("jump_decomposition: invalid grid");
  check_points(model, points);

  JumpDecomposition out;
  out.r = r;
  out.t = t;
  out.poisson_terms = n_terms;
  out.big_mass = model.tail_mass(r);
  const double lambda = t * out.big_mass;
  out.series_remainder = boost::math::gamma_p(n_terms + 1, lambda);

  // Small-jump density by trapezoidal cosine inversion: e^{-t Psi_r} is entire
  // and ptilde decays faster than exponentially, so the step 2 pi / period
  // aliases only from distance `period`.
  const double period = 2.0 * opt.half_width;
  const double dxi = 2.0 * kPi / period;
  std::vector<double> weights{1.0};
  for (int k = 1;; ++k) {
    const double e = std::exp(-t * psi_small_jumps(model, r, k * dxi));
    weights.push_back(e);
    if (e < 1e-18 || k > 2000000) break;
  }
  auto ptilde = [&](double x) {
    double s = 0.5 * weights[0];
    for (std::size_t k = 1; k < weights.size(); ++k) s += weights[k] * std::cos(x * static_cast<double>(k) * dxi);
    return s * dxi / kPi;
  };

  // Cell masses of nubar on the grid y_k = k h, |k| <= n.
  const double h = opt.h;
  const long n = std::lround(opt.half_width / h);
  const std::size_t size = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> cells(size, 0.0);
  parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t k) {
    const double lo = std::max((static_cast<double>(k) - 0.5) * h, r);
    const double hi = (static_cast<double>(k) + 0.5) * h;
    if (hi <= lo) return;
    quad::Options o;
    o.rel_tol = 1e-13;
    const double mass = quad::adaptive([&](double y) { return model.density(y); }, lo, hi, o).value;
    cells[static_cast<std::size_t>(n) + k] = mass;
    cells[static_cast<std::size_t>(n) - k] = mass;
  });

  std::size_t padded = 1;
  while (padded < 2 * size) padded <<= 1;
  Eigen::FFT<double> fft;
  std::vector<double> buf(padded, 0.0);
  std::copy(cells.begin(), cells.end(), buf.begin());
  std::vector<std::complex<double>> cells_hat;
  fft.fwd(cells_hat, buf);

  // P masses: e^{-lambda} sum_n t^n/n! nubar^{*n}.
  std::vector<double> power = cells;
  std::vector<double> big(size, 0.0);
  double coeff = std::exp(-lambda);
  auto ratio_sup = [&](const std::vector<double>& v) {
    double best = 0.0;
    for (long k = std::lround(1.0 / h); k <= std::min(n, std::lround(30.0 / h)); ++k) {
      const double x = static_cast<double>(k) * h;
      best = std::max(best, v[static_cast<std::size_t>(n + k)] / h / model.density(x));
    }
    return best;
  };
  for (int k = 1; k <= n_terms; ++k) {
    if (k > 1) convolve_central(fft, cells_hat, power, padded);
    coeff *= t / k;
    for (std::size_t i = 0; i < size; ++i) big[i] += coeff * power[i];
    if (k <= 3) out.convolution_ratio_sup.push_back(ratio_sup(power));
  }
  double big_total = 0.0;
  for (double v : big) big_total += v;
  out.lost_mass = std::max(0.0, (1.0 - out.series_remainder) - std::exp(-lambda) - big_total);
  out.aliasing_warning = out.lost_mass > 1e-6;

  // ptilde on the grid, where it is non-negligible.
  const long reach = std::min(n, std::lround(std::min(opt.half_width, 60.0) / h));
  std::vector<double> pt_grid(static_cast<std::size_t>(reach + 1));
  parallel_for(pt_grid.size(), [&](std::size_t k) { pt_grid[k] = ptilde(static_cast<double>(k) * h); });

  out.small_grid = KernelGrid{KernelKind::heat, t, 1, KernelMethod::decomposition, {}, {}, {}, {}};
  out.big_grid = out.small_grid;
  out.recombined = out.small_grid;
  const double e_small = std::exp(-lambda);
  double ptilde_mass = 0.0;
  for (long k = -reach; k <= reach; ++k) ptilde_mass += pt_grid[static_cast<std::size_t>(std::labs(k))] * h;
  out.total_mass = e_small * ptilde_mass + ptilde_mass * big_total;

  for (double x : points) {
    const double kx = x / h;
    const long kr = std::lround(kx);
    const bool on_grid = std::abs(kx - static_cast<double>(kr)) < 1e-9 && std::labs(kr) <= n;
    const double small = on_grid && std::labs(kr) <= reach ? pt_grid[static_cast<std::size_t>(std::labs(kr))]
                                                           : ptilde(x);
    double conv = 0.0;
    for (long j = -n; j <= n; ++j) {
      const double mass = big[static_cast<std::size_t>(n + j)];
      if (mass == 0.0) continue;
      double pv;
      if (on_grid) {
        const long off = std::labs(kr - j);
        if (off > reach) continue;
        pv = pt_grid[static_cast<std::size_t>(off)];
      } else {
        const double off = std::abs(x - static_cast<double>(j) * h);
        if (off > reach * h) continue;
        pv = ptilde(off);
      }
      conv += pv * mass;
    }
    double big_density = 0.0;
    if (std::labs(kr) <= n) big_density = big[static_cast<std::size_t>(n + kr)] / h;
    out.small_grid.points.push_back(x);
    out.small_grid.values.push_back(small);
    out.small_grid.errors.push_back(0.0);
    out.small_grid.flags.push_back(0u);
    out.big_grid.points.push_back(x);
    out.big_grid.values.push_back(big_density);
    out.big_grid.errors.push_back(out.series_remainder / h);
    out.big_grid.flags.push_back(0u);
    out.recombined.points.push_back(x);
    out.recombined.values.push_back(e_small * small + conv);
    out.recombined.errors.push_back(out.series_remainder * (*std::max_element(pt_grid.begin(), pt_grid.end())));
    out.recombined.flags.push_back(0u);
  }
  return out;
}

}  // namespace levyk
