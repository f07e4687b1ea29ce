#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "oracles.hpp"

using namespace levyk;

namespace {

const LevyModel& rel() {
  static const LevyModel m = LevyModel::create(1, RelativisticStable{1.0, 1.0});
  return m;
}

}  // namespace

TEST_CASE("omega: closed form values by quadrature") {
  const std::vector<double> zero{0.0};
  CHECK(omega(rel(), zero).value == 0.0);
  for (double s : {0.2, 0.5, 0.6, 0.9, 1.0}) {
    const double exact = oracle::relativistic_omega(1.0, 1.0, s);
    const OmegaEvaluation q = omega_radial(rel(), s, OmegaMethod::quadrature);
    CHECK_FALSE(q.diverged);
    CHECK(q.value == doctest::Approx(exact).epsilon(1e-6));
  }
  CHECK(omega_radial(rel(), 0.6).value == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(omega_radial(rel(), 1.0, OmegaMethod::quadrature).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(omega_radial(rel(), 1.2).diverged);
  CHECK(omega_radial(rel(), 1.2, OmegaMethod::quadrature).diverged);
}

TEST_CASE("omega: symmetry, radiality and strict convexity") {
  const LevyModel m3 = LevyModel::create(3, RelativisticStable{1.0, 1.0});
  const std::vector<double> a{0.5, 0.0, 0.0}, b{0.0, -0.3, 0.4};
  CHECK(omega(m3, a, OmegaMethod::quadrature).value == doctest::Approx(omega(m3, b, OmegaMethod::quadrature).value).epsilon(1e-10));
  CHECK(omega(m3, a, OmegaMethod::quadrature).value ==
        doctest::Approx(oracle::relativistic_omega(1.0, 1.0, 0.5)).epsilon(1e-6));
  const std::vector<double> p{0.4}, mp{-0.4};
  CHECK(omega(rel(), p).value == omega(rel(), mp).value);
  const LevyModel tem = LevyModel::create(1, TemperedStable{1.0, 1.0, 1.0, 2.5});
  std::vector<double> v;
  for (int i = 0; i <= 10; ++i) v.push_back(omega_radial(tem, 0.095 * i).value);
  for (int i = 1; i < 10; ++i) CHECK(v[i - 1] - 2.0 * v[i] + v[i + 1] > 0.0);
}

TEST_CASE("omega_restricted splits the integral") {
  const std::vector<double> xi{0.7};
  const double full = omega(rel(), xi, OmegaMethod::quadrature).value;
  for (double r : {0.5, 1.0, 5.0}) {
    const double small = omega_restricted(rel(), xi, r, Side::small).value;
    const double large = omega_restricted(rel(), xi, r, Side::large).value;
    CHECK(small + large == doctest::Approx(full).epsilon(1e-8));
  }
  const std::vector<double> zero{0.0};
  CHECK(omega_restricted(rel(), zero, 1.0, Side::small).value == 0.0);
  // Compact ball: finite even at |xi| = 2 kappa; compare with a refined Simpson rule.
  const std::vector<double> two{2.0};
  const OmegaEvaluation s5 = omega_restricted(rel(), two, 5.0, Side::small);
  CHECK_FALSE(s5.diverged);
  const int n = 2000000;
  const double lo = 1e-6, h = (5.0 - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * (std::cosh(2.0 * y) - 1.0) * rel().density(y);
  }
  CHECK(s5.value == doctest::Approx(2.0 * sum * h / 3.0).epsilon(1e-6));
  CHECK(omega_restricted(rel(), two, 5.0, Side::large).diverged);
}

TEST_CASE("omega_prime: closed form, finite differences and monotonicity") {
  const std::vector<double> theta{1.0};
  CHECK(omega_prime(rel(), 0.6, theta).value == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(omega_prime(rel(), 0.6, theta, OmegaMethod::quadrature).value == doctest::Approx(0.75).epsilon(1e-6));
  const double h = 1e-4;
  const double fd = (omega_radial(rel(), 0.3 + h, OmegaMethod::quadrature).value -
                     omega_radial(rel(), 0.3 - h, OmegaMethod::quadrature).value) / (2.0 * h);
  CHECK(omega_prime(rel(), 0.3, theta, OmegaMethod::quadrature).value == doctest::Approx(fd).epsilon(1e-5));
  double prev = 0.0;
  for (double s = 0.05; s < 1.0; s += 0.1) {
    const double d = omega_prime(rel(), s, theta, OmegaMethod::quadrature).value;
    CHECK(d > prev);
    CHECK(d == doctest::Approx(oracle::relativistic_omega_prime(1.0, 1.0, s)).epsilon(1e-6));
    prev = d;
  }
  const std::vector<double> bad{2.0};
  CHECK_THROWS_AS(omega_prime(rel(), 0.5, bad), DomainError);
  CHECK_THROWS_AS(omega_prime(rel(), 1.0, theta), DomainError);
}

TEST_CASE("omega_star") {
  CHECK(omega_star(rel(), OmegaMethod::quadrature) == doctest::Approx(1.0).epsilon(1e-8));
  const LevyModel r2 = LevyModel::create(1, RelativisticStable{0.5, 2.0});
  CHECK(omega_star(r2) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(omega_star(r2, OmegaMethod::quadrature) == doctest::Approx(2.0).epsilon(1e-8));
  const LevyModel tem = LevyModel::create(1, TemperedStable{1.0, 1.0, 1.0, 2.5});
  const double w = omega_star(tem);
  CHECK(std::isfinite(w));
  CHECK(w > 0.0);
  // Heavy h tail: diverges at kappa.
  const LevyModel heavy = LevyModel::create(1, TemperedStable{1.0, 1.0, 1.0, 0.5});
  CHECK(std::isinf(omega_star(heavy)));
}

TEST_CASE("gamma_alpha") {
  const std::vector<double> theta{1.0};
  CHECK(gamma_alpha(rel(), 0.5, theta) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-10));
  CHECK(gamma_alpha(rel(), 2.0, theta) == 1.0);
  CHECK(gamma_alpha(rel(), 1.0, theta) == 1.0);
  const double g = gamma_alpha(rel(), 0.3, theta, OmegaMethod::quadrature);
  CHECK(omega_radial(rel(), g, OmegaMethod::quadrature).value == doctest::Approx(0.3).epsilon(1e-8));
  double prev = 0.0;
  for (double a = 0.05; a < 3.0; a += 0.05) {
    const double v = gamma_alpha(rel(), a, theta);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    CHECK(std::abs(v - prev) < 0.35);
    prev = v;
  }
  // Divergent omega at kappa: the inverse exists for every alpha.
  const LevyModel heavy = LevyModel::create(1, TemperedStable{1.0, 1.0, 1.0, 0.5});
  const double gh = gamma_alpha(heavy, 50.0, theta);
  CHECK(gh < 1.0);
  CHECK(omega_radial(heavy, gh).value == doctest::Approx(50.0).epsilon(1e-8));
}

TEST_CASE("exp_moment") {
  const std::vector<double> zero{0.0}, one{1.0}, over{1.2};
  CHECK(exp_moment(rel(), zero).value == doctest::Approx(rel().tail_mass(1.0)).epsilon(1e-10));
  const OmegaEvaluation e1 = exp_moment(rel(), one);
  CHECK_FALSE(e1.diverged);
  CHECK(std::isfinite(e1.value));
  CHECK(exp_moment(rel(), over).diverged);
  // Brute-force tail summation of e^{0.2 r} r^{-3/2}-type growth passes the cap.
  double partial = 0.0;
  for (double r = 1.0; r < 200.0; r += 1e-3) partial += 1e-3 * 2.0 * std::exp(1.2 * r) * rel().density(r);
  CHECK(partial > 1e12);
}

TEST_CASE("subexponential profiles are unsupported") {
  const LevyModel st = LevyModel::create(1, PureStable{1.0});
  const std::vector<double> theta{1.0}, xi{0.5}, zero{0.0};
  CHECK_THROWS_AS(omega(st, xi), UnsupportedProfile);
  CHECK_THROWS_AS(gamma_alpha(st, 1.0, theta), UnsupportedProfile);
  CHECK_THROWS_AS(omega_star(st), UnsupportedProfile);
  CHECK(omega(st, zero).value == 0.0);
  CHECK(exp_moment(st, xi).diverged);
}

TEST_CASE("decay rate curve") {
  const std::vector<double> alphas{0.1, 0.5, 1.0, 1.5, 2.0}, theta{1.0};
  const DecayRateCurve c = decay_rate_curve(rel(), alphas, theta);
  CHECK(c.kappa == 1.0);
  CHECK(c.omega_star_kappa == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < alphas.size(); ++i)
    CHECK(c.rates[i] == doctest::Approx(oracle::relativistic_gamma(1.0, alphas[i])).epsilon(1e-10));
}
