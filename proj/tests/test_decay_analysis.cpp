#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "levyk/decay_analysis.hpp"
#include "levyk/errors.hpp"
#include "oracles.hpp"

using namespace levyk;

namespace {

std::vector<double> grid(double a, double b, double h) {
  std::vector<double> v;
  for (double x = a; x <= b + 1e-12; x += h) v.push_back(x);
  return v;
}

template <class F>
std::vector<double> sample(const std::vector<double>& xs, F f) {
  std::vector<double> v;
  for (double x : xs) v.push_back(f(x));
  return v;
}

}  // namespace

TEST_CASE("exact synthetic exponentials are recovered") {
  const auto xs = grid(1.0, 40.0, 0.5);
  const auto v = sample(xs, [](double x) { return 3.0 * std::exp(-2.0 * x); });
  const DecayFit f = fit_exponential_rate(xs, v, false);
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f.rms_residual < 1e-10);
  CHECK_FALSE(f.flagged);

  const auto w = sample(xs, [](double x) { return std::pow(x, -3.0) * std::exp(-x); });
  const DecayFit g = fit_exponential_rate(xs, w, true);
  CHECK(g.rate == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.power == doctest::Approx(-3.0).epsilon(1e-9));
  // Without the correction the power factor biases the rate upwards.
  CHECK(fit_exponential_rate(xs, w, false).rate > 1.05);
}

TEST_CASE("power law fit") {
  const auto xs = grid(1.0, 50.0, 0.5);
  const auto v = sample(xs, [](double x) { return 0.7 * std::pow(x, -2.5); });
  const DecayFit f = fit_powerlaw(xs, v);
  CHECK(f.power == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(f.rate == 0.0);
}

TEST_CASE("default window drops the near field") {
  const auto xs = grid(1.0, 40.0, 0.5);
  const auto v = sample(xs, [](double x) { return std::exp(-x); });
  const DecayFit f = fit_exponential_rate(xs, v, false);
  CHECK(f.x_lo >= 5.0);
  CHECK(f.x_hi == 40.0);
  const auto few = grid(1.0, 5.0, 0.25);
  const auto fv = sample(few, [](double x) { return std::exp(-x); });
  const DecayFit g = fit_exponential_rate(few, fv, false);
  CHECK(g.x_lo < 5.0);
  CHECK(g.x_lo >= 1.0 + 0.2 * 4.0 - 1e-12);
}

TEST_CASE("explicit window, flags and errors exclude points") {
  const auto xs = grid(1.0, 30.0, 1.0);
  auto v = sample(xs, [](double x) { return std::exp(-0.5 * x); });
  v[25] = 1.0;  // outlier at x = 26
  std::vector<unsigned> flags(xs.size(), 0u);
  FitOptions opt;
  opt.x_lo = 2.0;
  opt.x_hi = 30.0;
  CHECK(fit_exponential_rate(xs, v, false, opt).flagged);
  flags[25] = kernel_flag::underflow;
  opt.flags = flags;
  const DecayFit f = fit_exponential_rate(xs, v, false, opt);
  CHECK(f.rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.n_points == 28);

  std::vector<double> errs(xs.size(), 0.0);
  errs[25] = 0.5;
  FitOptions eopt;
  eopt.x_lo = 2.0;
  eopt.errors = errs;
  CHECK(fit_exponential_rate(xs, v, false, eopt).rate == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("too few points and nonpositive values") {
  const std::vector<double> xs{1.0, 2.0};
  const std::vector<double> v{1.0, 0.5};
  CHECK_THROWS_AS(fit_exponential_rate(xs, v, true), DomainError);
  const std::vector<double> ys{6.0, 7.0, 8.0, 9.0};
  const std::vector<double> w{1.0, 0.0, -1.0, 0.0};
  FitOptions opt;
  opt.x_lo = 6.0;
  CHECK_THROWS_AS(fit_powerlaw(ys, w, opt), DomainError);
}

TEST_CASE("ratio report") {
  const auto xs = grid(1.0, 50.0, 1.0);
  const auto num = sample(xs, [](double x) { return (2.0 + std::sin(x)) / (x * x); });
  const auto den = sample(xs, [](double x) { return 1.0 / (x * x); });
  const ComparabilityReport r = ratio_report(xs, num, den, 5.0, 40.0);
  double lo = 3.0, hi = 0.0;
  for (double x = 5.0; x <= 40.0; x += 1.0) {
    lo = std::min(lo, 2.0 + std::sin(x));
    hi = std::max(hi, 2.0 + std::sin(x));
  }
  CHECK(r.inf_ratio == doctest::Approx(lo).epsilon(1e-14));
  CHECK(r.sup_ratio == doctest::Approx(hi).epsilon(1e-14));
  CHECK(r.band == doctest::Approx(hi / lo).epsilon(1e-14));
  CHECK(r.n_points == 36);
}

TEST_CASE("transition sweep tracks gamma_alpha") {
  const LevyModel m = LevyModel::create(1, RelativisticStable{1.0, 1.0});
  const std::vector<double> alphas{0.5, 2.0};
  const auto xs = grid(1.0, 60.0, 0.5);
  const TransitionCurve c = transition_sweep(m, alphas, xs);
  REQUIRE(c.fitted_rates.size() == 2);
  CHECK(c.omega_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.predicted_rates[0] == doctest::Approx(oracle::relativistic_gamma(1.0, 0.5)).epsilon(1e-10));
  CHECK(c.predicted_rates[1] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(c.residuals[i]) < 0.03);
  std::ostringstream os;
  c.write_csv(os);
  CHECK(os.str().rfind("alpha,fitted_rate,predicted_rate,residual\n", 0) == 0);
  const LevyModel st = LevyModel::create(1, PureStable{1.5});
  CHECK_THROWS_AS(transition_sweep(st, alphas, xs), UnsupportedProfile);
}
