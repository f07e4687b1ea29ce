#include "levyk/decay_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/format.hpp"
#include "levyk/parallel.hpp"

namespace levyk {

namespace {

struct Sample {
  std::vector<double> x;
  std::vector<double> y;  // log values
};

Sample select(std::span<const double> points, std::span<const double> values, const FitOptions& opt) {
  if (points.size() != values.size()) throw DomainError("fit: points and values differ in length");
  if (!std::is_sorted(points.begin(), points.end())) throw DomainError("fit: points must be ascending");
  if (!opt.flags.empty() && opt.flags.size() != points.size()) throw DomainError("fit: flags length mismatch");
  if (!opt.errors.empty() && opt.errors.size() != points.size()) throw DomainError("fit: errors length mismatch");
  double lo = opt.x_lo.value_or(-std::numeric_limits<double>::infinity());
  if (!opt.x_lo && !points.empty()) {
    const double first = points.front(), last = points.back();
    lo = first + 0.2 * (last - first);
    const auto from5 = points.end() - std::lower_bound(points.begin(), points.end(), 5.0);
    if (lo < 5.0 && from5 >= 8) lo = 5.0;
  }
  const double hi = opt.x_hi.value_or(std::numeric_limits<double>::infinity());
  Sample s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < lo || points[i] > hi) continue;
    if (!opt.flags.empty() && opt.flags[i] != 0) continue;
    if (!(values[i] > 0.0)) throw DomainError("fit: values in the window must be positive");
    if (!opt.errors.empty() && opt.errors[i] > 1e-2 * values[i]) continue;
    s.x.push_back(points[i]);
    s.y.push_back(std::log(values[i]));
  }
  if (s.x.size() < 8) throw DomainError("fit: fewer than 8 usable points in the window");
  return s;
}

// Least squares y ~ A c with column equilibration; returns c and rms residual.
std::pair<Eigen::VectorXd, double> least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale[j] == 0.0) scale[j] = 1.0;
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::VectorXd c = as.colPivHouseholderQr().solve(y);
  c = c.cwiseQuotient(scale);
  const double rms = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(y.size()));
  return {c, rms};
}

DecayFit finish(const Sample& s, double rate, double power, double constant, double rms) {
  DecayFit f;
  f.rate = rate;
  f.power = power;
  f.constant = constant;
  f.x_lo = s.x.front();
  f.x_hi = s.x.back();
  f.rms_residual = rms;
  f.n_points = static_cast<int>(s.x.size());
  f.flagged = rms > 0.05;
  return f;
}

}  // namespace

DecayFit fit_exponential_rate(std::span<const double> points, std::span<const double> values,
                              bool power_correction, const FitOptions& opt) {
  const Sample s = select(points, values, opt);
  const Eigen::Index n = static_cast<Eigen::Index>(s.x.size());
  Eigen::MatrixXd a(n, power_correction ? 3 : 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s.x[static_cast<std::size_t>(i)];
    if (power_correction && !(x > 0.0)) throw DomainError("fit: power correction needs positive radii");
    a(i, 0) = -x;
    if (power_correction) a(i, 1) = std::log(x);
    a(i, a.cols() - 1) = 1.0;
    y[i] = s.y[static_cast<std::size_t>(i)];
  }
  const auto [c, rms] = least_squares(a, y);
  return finish(s, c[0], power_correction ? c[1] : 0.0, c[a.cols() - 1], rms);
}

DecayFit fit_powerlaw(std::span<const double> points, std::span<const double> values, const FitOptions& opt) {
  const Sample s = select(points, values, opt);
  const Eigen::Index n = static_cast<Eigen::Index>(s.x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s.x[static_cast<std::size_t>(i)];
    if (!(x > 0.0)) throw DomainError("fit_powerlaw: radii must be positive");
    a(i, 0) = std::log(x);
    a(i, 1) = 1.0;
    y[i] = s.y[static_cast<std::size_t>(i)];
  }
  const auto [c, rms] = least_squares(a, y);
  return finish(s, 0.0, c[0], c[1], rms);
}

ComparabilityReport ratio_report(std::span<const double> points, std::span<const double> num,
                                 std::span<const double> den, double x_lo, double x_hi,
                                 std::span<const unsigned> flags) {
  if (points.size() != num.size() || points.size() != den.size())
    throw DomainError("ratio_report: arrays must be aligned");
  ComparabilityReport rep;
  rep.inf_ratio = std::numeric_limits<double>::infinity();
  rep.sup_ratio = 0.0;
  rep.x_lo = std::numeric_limits<double>::infinity();
  rep.x_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = std::abs(points[i]);
    if (x < x_lo || x > x_hi) continue;
    if (!flags.empty() && flags[i] != 0) continue;
    if (!(den[i] > 0.0)) throw DomainError("ratio_report: denominators must be positive");
    const double r = num[i] / den[i];
    rep.inf_ratio = std::min(rep.inf_ratio, r);
    rep.sup_ratio = std::max(rep.sup_ratio, r);
    rep.x_lo = std::min(rep.x_lo, x);
    rep.x_hi = std::max(rep.x_hi, x);
    ++rep.n_points;
  }
  if (rep.n_points == 0) throw DomainError("ratio_report: empty window");
  rep.band = rep.sup_ratio / rep.inf_ratio;
  return rep;
}

void TransitionCurve::write_csv(std::ostream& out) const {
  out << "alpha,fitted_rate,predicted_rate,residual\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out << fmt17(alphas[i]) << ',' << fmt17(fitted_rates[i]) << ',' << fmt17(predicted_rates[i]) << ','
        << fmt17(residuals[i]) << '\n';
  }
}

TransitionCurve transition_sweep(const LevyModel& model, std::span<const double> alphas,
                                 std::span<const double> points, std::optional<double> x_lo,
                                 std::optional<double> x_hi) {
  require_kappa(model);
  if (model.dim() != 1) throw DomainError("transition_sweep: only d = 1 is supported");
  for (double x : points)
    if (!(x > 0.0)) throw DomainError("transition_sweep: points must be positive");
  TransitionCurve curve;
  curve.omega_star = omega_star(model);
  const std::size_t n = alphas.size();
  curve.alphas.assign(alphas.begin(), alphas.end());
  curve.fitted_rates.resize(n);
  curve.predicted_rates.resize(n);
  curve.residuals.resize(n);
  curve.fits.resize(n);
  const std::vector<double> theta{1.0};
  parallel_for(n, [&](std::size_t i) {
    const KernelGrid g = resolvent_freq(model, alphas[i], points);
    FitOptions opt;
    opt.x_lo = x_lo;
    opt.x_hi = x_hi;
    opt.flags = g.flags;
    opt.errors = g.errors;
    curve.fits[i] = fit_exponential_rate(g.points, g.values, true, opt);
    curve.fitted_rates[i] = curve.fits[i].rate;
    curve.residuals[i] = curve.fits[i].rms_residual;
    curve.predicted_rates[i] = gamma_alpha(model, alphas[i], theta);
  });
  return curve;
}

}  // namespace levyk
