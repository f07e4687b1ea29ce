#include <doctest.h>

#include <cmath>
#include <sstream>

#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/schrodinger.hpp"

using namespace levyk;

namespace {

const LevyModel& cauchy() {
  static const LevyModel m = LevyModel::create(1, PureStable{1.0});
  return m;
}

const LevyModel& rel() {
  static const LevyModel m = LevyModel::create(1, RelativisticStable{1.0, 1.0});
  return m;
}

}  // namespace

TEST_CASE("potentials") {
  CHECK(potential_value(SquareWell{2.0, 1.0}, 0.5) == -2.0);
  CHECK(potential_value(SquareWell{2.0, 1.0}, 1.5) == 0.0);
  CHECK(potential_value(GaussianWell{1.0, 2.0}, 2.0) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-15));
  const TabulatedPotential t{{-1.0, 0.0, 1.0}, {0.0, -1.0, 0.0}};
  CHECK(potential_value(t, 0.25) == doctest::Approx(-0.75));
  CHECK(potential_value(t, 3.0) == 0.0);
  CHECK(potential_support(SquareWell{2.0, 1.0}).second == doctest::Approx(1.0));
  const auto g = potential_support(GaussianWell{1.0, 1.0});
  CHECK(std::exp(-0.5 * g.second * g.second) == doctest::Approx(1e-16).epsilon(1e-6));
  CHECK_THROWS_AS(validate_potential(SquareWell{-1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate_potential(TabulatedPotential{{0.0, 1.0}, {-1.0, -1.0}}), DomainError);
  CHECK_THROWS_AS(validate_potential(TabulatedPotential{{1.0, 0.0}, {0.0, 0.0}}), DomainError);
}

TEST_CASE("Birman-Schwinger eigenvalue: power iteration against the dense solver") {
  const BsGrid grid{0.02, 12.0};
  const BsEigen e = bs_eigenvalue(rel(), SquareWell{1.0, 1.0}, 0.5, grid, true);
  CHECK(e.converged);
  CHECK(e.mu == doctest::Approx(e.dense_mu).epsilon(1e-9));
  for (double p : e.phi) CHECK(p >= 0.0);
  // The operator is linear in |V|.
  const BsEigen d = bs_eigenvalue(rel(), SquareWell{2.0, 1.0}, 0.5, grid);
  CHECK(d.mu == doctest::Approx(2.0 * e.mu).epsilon(1e-9));
  // mu decreases in alpha.
  CHECK(bs_eigenvalue(rel(), SquareWell{1.0, 1.0}, 1.0, grid).mu < e.mu);
  const LevyModel m2 = LevyModel::create(2, RelativisticStable{1.0, 1.0});
  CHECK_THROWS_AS(bs_eigenvalue(m2, SquareWell{1.0, 1.0}, 0.5, grid), DomainError);
}

TEST_CASE("bound state: exponential profile, shallow and deep wells") {
  const auto shallow = find_bound_state(rel(), SquareWell{0.5, 1.0});
  REQUIRE(shallow);
  CHECK(shallow->converged);
  CHECK(shallow->mu_residual < 1e-8);
  CHECK(shallow->lambda < 0.0);
  CHECK(shallow->lambda > -1.0);
  const double gamma = gamma_alpha(rel(), -shallow->lambda, std::vector<double>{1.0});
  CHECK(shallow->predicted_rate == doctest::Approx(gamma).epsilon(1e-10));
  CHECK(shallow->tail_fit.rate == doctest::Approx(gamma).epsilon(0.03));

  const auto deep = find_bound_state(rel(), SquareWell{3.0, 1.0});
  REQUIRE(deep);
  CHECK(deep->lambda < -1.0);
  CHECK(deep->predicted_rate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(deep->tail_fit.rate == doctest::Approx(1.0).epsilon(0.03));

  std::ostringstream os;
  deep->write_csv(os);
  CHECK(os.str().rfind("x,phi\n", 0) == 0);
}

TEST_CASE("bound state: grid refinement") {
  const auto a = find_bound_state(rel(), SquareWell{0.5, 1.0}, BsGrid{0.04, 0.0});
  const auto b = find_bound_state(rel(), SquareWell{0.5, 1.0}, BsGrid{0.02, 0.0});
  REQUIRE(a);
  REQUIRE(b);
  CHECK(std::abs(a->lambda - b->lambda) < 1e-3);
}

TEST_CASE("bound state: subexponential profile") {
  const auto r = find_bound_state(cauchy(), SquareWell{1.0, 1.0});
  REQUIRE(r);
  CHECK(std::isnan(r->predicted_rate));
  CHECK(r->tail_fit.rate == 0.0);
  CHECK(r->tail_fit.power == doctest::Approx(-2.0).epsilon(0.1));
  const GroundStateProfileReport rep = ground_state_profile_report(*r, cauchy());
  CHECK_FALSE(rep.window_too_small);
  CHECK(rep.ratio.band < 3.0);
  CHECK_THROWS_AS(ground_state_profile_report(*r, rel()), UnsupportedProfile);
}

TEST_CASE("no bound state without a potential") {
  CHECK_FALSE(find_bound_state(rel(), SquareWell{0.0, 1.0}).has_value());
}
