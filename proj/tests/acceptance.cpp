// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "levyk/decay_analysis.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/kernels.hpp"
#include "levyk/levy_models.hpp"
#include "levyk/profile_analysis.hpp"
#include "levyk/schrodinger.hpp"
#include "oracles.hpp"

using namespace levyk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

std::vector<double> grid(double a, double b, double h) {
  std::vector<double> v;
  for (double x = a; x <= b + 1e-9; x += h) v.push_back(x);
  return v;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<double> kE1{1.0};

LevyModel rel() { return LevyModel::create(1, RelativisticStable{1.0, 1.0}); }

void c1(Outcome& o) {
  const LevyModel m = rel();
  double psi_err = 0.0, omega_err = 0.0, prime_err = 0.0;
  for (double s : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0})
    psi_err = std::max(psi_err, rel_err(psi_radial(m, s, PsiMethod::quadrature).value, oracle::relativistic_psi(1.0, 1.0, s)));
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99})
    omega_err = std::max(omega_err, rel_err(omega_radial(m, s, OmegaMethod::quadrature).value, oracle::relativistic_omega(1.0, 1.0, s)));
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9})
    prime_err = std::max(prime_err, rel_err(omega_prime(m, s, kE1, OmegaMethod::quadrature).value,
                                            oracle::relativistic_omega_prime(1.0, 1.0, s)));
  const double star = omega_star(m, OmegaMethod::quadrature);
  o.detail << "psi " << psi_err << " omega " << omega_err << " omega' " << prime_err << " |omega*-1| " << std::abs(star - 1.0);
  o.require(psi_err <= 1e-6, "psi");
  o.require(omega_err <= 1e-6, "omega");
  o.require(prime_err <= 1e-6, "omega'");
  o.require(std::abs(star - 1.0) <= 1e-8, "omega*");
}

void c2(Outcome& o) {
  const LevyModel m = rel();
  double err = 0.0;
  for (double a : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 2.0})
    err = std::max(err, std::abs(gamma_alpha(m, a, kE1, OmegaMethod::quadrature) - oracle::relativistic_gamma(1.0, a)));
  o.detail << "max abs error " << err;
  o.require(err <= 1e-6, "gamma");
}

void c3(Outcome& o) {
  const LevyModel m = LevyModel::create(1, PureStable{1.0});
  const auto xs = grid(-20.0, 20.0, 0.25);
  double err = 0.0;
  for (double t : {0.1, 1.0, 10.0}) {
    const KernelGrid g = heat_kernel(m, t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) err = std::max(err, rel_err(g.values[i], oracle::cauchy_heat(t, xs[i])));
  }
  o.detail << "max rel error " << err;
  o.require(err <= 1e-6, "heat");
}

void c4(Outcome& o) {
  const std::vector<LevyModel> models{LevyModel::create(1, PureStable{1.0}), LevyModel::create(1, PureStable{1.5}), rel()};
  const auto xs = grid(2.0, 30.0, 1.0);
  double err = 0.0;
  for (const auto& m : models)
    for (double a : {0.5, 2.0}) {
      const KernelGrid f = resolvent_freq(m, a, xs), t = resolvent_time(m, a, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) err = std::max(err, rel_err(f.values[i], t.values[i]));
    }
  o.detail << "max rel difference " << err;
  o.require(err <= 1e-4, "freq vs time");
}

void c5(Outcome& o) {
  const LevyModel m = LevyModel::create(1, PureStable{1.5});
  const auto xs = grid(2.0, 50.0, 0.5);
  std::vector<double> f;
  for (double x : xs) f.push_back(m.profile_at(x));
  for (double a : {0.25, 1.0, 4.0}) {
    const KernelGrid g = resolvent_freq(m, a, xs);
    const ComparabilityReport r = ratio_report(xs, g.values, f, 2.0, 50.0, g.flags);
    o.detail << "band(" << a << ") " << r.band << " ";
    o.require(r.band <= 50.0, "band");
    const auto tail = grid(5.0, 50.0, 0.5);
    const KernelGrid gt = resolvent_freq(m, a, tail);
    FitOptions opt;
    opt.flags = gt.flags;
    const DecayFit fit = fit_powerlaw(tail, gt.values, opt);
    o.detail << "power(" << a << ") " << fit.power << " ";
    if (a == 1.0) o.require(std::abs(fit.power + 2.5) <= 0.1, "power law exponent at alpha = 1");
  }
}

void c6(Outcome& o) {
  const LevyModel m = rel();
  const std::vector<double> alphas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  const TransitionCurve c = transition_sweep(m, alphas, grid(1.0, 80.0, 0.5));
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    o.detail << alphas[i] << ":" << c.fitted_rates[i] << " ";
    o.require(std::abs(c.residuals[i]) <= 0.03, "rate at alpha " + std::to_string(alphas[i]));
    o.require(!c.fits[i].flagged, "fit residual");
    if (i > 0) o.require(c.fitted_rates[i] >= c.fitted_rates[i - 1] - 0.03, "continuity");
  }
  // Window sensitivity: the same fits with the window start moved right by 25%.
  const TransitionCurve s = transition_sweep(m, alphas, grid(1.0, 80.0, 0.5), 1.25 * c.fits[0].x_lo);
  double shift = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) shift = std::max(shift, std::abs(s.fitted_rates[i] - c.fitted_rates[i]));
  o.detail << "window shift " << shift;
  o.require(shift <= 0.03, "window sensitivity");
}

void c7(Outcome& o) {
  const LevyModel m = rel();
  const auto xs = grid(5.0, 40.0, 0.25);
  const KernelGrid g = resolvent_freq(m, 2.0, xs);
  std::vector<double> f;
  for (double x : xs) f.push_back(m.profile_at(x));
  const ComparabilityReport r = ratio_report(xs, g.values, f, 5.0, 40.0, g.flags);
  o.detail << "band " << r.band;
  o.require(r.band <= 20.0, "band");
}

void c8(Outcome& o) {
  const std::vector<LevyModel> models{LevyModel::create(1, PureStable{1.0}), rel()};
  double heat = 0.0, res = 0.0, semi = 0.0;
  for (const auto& m : models) {
    for (double t : {0.5, 1.0}) heat = std::max(heat, std::abs(heat_mass(m, t).mass - 1.0));
    for (double a : {0.5, 2.0}) res = std::max(res, std::abs(resolvent_mass(m, a).mass - 1.0 / a));
    semi = std::max(semi, semigroup_check(m, 0.5).sup_relative);
  }
  o.detail << "heat mass " << heat << " resolvent mass " << res << " semigroup " << semi;
  o.require(heat <= 1e-6, "heat mass");
  o.require(res <= 1e-6, "resolvent mass");
  o.require(semi <= 1e-4, "semigroup");
}

void c9(Outcome& o) {
  const LevyModel m = rel();
  const auto xs = grid(0.0, 30.0, 0.1);
  std::size_t violations = 0;
  double worst = -INFINITY;
  for (double s : {0.4, 0.8})
    for (double t : {0.5, 2.0}) {
      const std::vector<double> xi{s};
      const ExpBoundReport r = exp_upper_bound_check(m, t, xi, xs);
      violations += r.violations;
      worst = std::max(worst, r.max_violation);
    }
  o.detail << "violations " << violations << " max(kernel - bound) " << worst;
  o.require(violations == 0, "violations");
}

void c10(Outcome& o) {
  const LevyModel m = LevyModel::create(1, TemperedStable{1.0, 1.0, 0.5, 0.0});
  const auto probes = default_kf_probes();
  const double k2 = kf(m, 2.0, probes).kf, k8 = kf(m, 8.0, probes).kf, k16 = kf(m, 16.0, probes).kf;
  o.detail << "K(2) " << k2 << " K(8) " << k8 << " K(16) " << k16;
  o.require(k2 > k8 && k8 > k16, "monotone");
  o.require(k16 < 0.5 * k2, "vanishing");
}

void dense_oracle(Outcome& o, const LevyModel& m, const PotentialSpec& v, const BoundStateResult& r) {
  const BsEigen e = bs_eigenvalue(m, v, -r.lambda, BsGrid{r.h, r.half_width}, true);
  o.require(std::abs(e.mu - e.dense_mu) <= 1e-8, "dense eigensolver");
}

// Halving the grid spacing must move lambda by less than 1e-3 relative.
void refinement(Outcome& o, const LevyModel& m, const PotentialSpec& v, const BoundStateResult& r, const char* tag) {
  const auto fine = find_bound_state(m, v, BsGrid{0.5 * r.h, 0.0});
  const double change = fine ? rel_err(fine->lambda, r.lambda) : INFINITY;
  o.detail << tag << " refinement " << change << "; ";
  o.require(change < 1e-3, std::string(tag) + " grid refinement");
}

void c11(Outcome& o) {
  const LevyModel cauchy = LevyModel::create(1, PureStable{1.0});
  const PotentialSpec wa = SquareWell{1.0, 1.0};
  const auto a = find_bound_state(cauchy, wa);
  o.require(a.has_value(), "(a) bound state");
  if (a) {
    const GroundStateProfileReport p = ground_state_profile_report(*a, cauchy);
    o.detail << "(a) lambda " << a->lambda << " band " << p.ratio.band << "; ";
    o.require(p.ratio.band <= 50.0 && !p.window_too_small, "(a) band");
    dense_oracle(o, cauchy, wa, *a);
    refinement(o, cauchy, wa, *a, "(a)");
  }
  const LevyModel m = rel();
  const PotentialSpec wb = SquareWell{0.5, 1.0};
  const auto b = find_bound_state(m, wb);
  o.require(b.has_value(), "(b) bound state");
  if (b) {
    o.detail << "(b) lambda " << b->lambda << " rate " << b->tail_fit.rate << " vs " << b->predicted_rate << "; ";
    o.require(b->lambda > -1.0, "(b) shallow");
    o.require(std::abs(b->tail_fit.rate - b->predicted_rate) <= 0.05, "(b) rate");
    dense_oracle(o, m, wb, *b);
    refinement(o, m, wb, *b, "(b)");
  }
  const PotentialSpec wc = SquareWell{3.0, 1.0};
  const auto c = find_bound_state(m, wc);
  o.require(c.has_value(), "(c) bound state");
  if (c) {
    o.detail << "(c) lambda " << c->lambda << " rate " << c->tail_fit.rate << " ";
    o.require(c->lambda < -1.0, "(c) deep");
    o.require(std::abs(c->tail_fit.rate - 1.0) <= 0.05, "(c) rate");
    dense_oracle(o, m, wc, *c);
    refinement(o, m, wc, *c, "(c)");
  }
}

void c12(Outcome& o) {
  const LevyModel m = LevyModel::create(1, PureStable{1.5});
  const auto xs = grid(-30.0, 30.0, 1.0);
  const JumpDecomposition j = jump_decomposition(m, 1.0, 0.5, xs, 30);
  const KernelGrid direct = heat_kernel(m, 0.5, xs);
  double err = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) err = std::max(err, rel_err(j.recombined.values[i], direct.values[i]));
  o.detail << "sup nubar^*2/nu " << j.convolution_ratio_sup.at(1) << " sup nubar^*3/nu " << j.convolution_ratio_sup.at(2)
           << " recombination " << err;
  o.require(std::isfinite(j.convolution_ratio_sup[1]) && std::isfinite(j.convolution_ratio_sup[2]), "finite ratios");
  o.require(err <= 1e-3, "recombination");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "closed-form exponent agreement", 10, c1},
      {2, "gamma curve", 5, c2},
      {3, "Cauchy heat kernel", 30, c3},
      {4, "resolvent cross-oracle", 300, c4},
      {5, "subexponential resolvent comparability", 300, c5},
      {6, "decay-rate transition", 600, c6},
      {7, "comparability above threshold", 120, c7},
      {8, "semigroup and normalization", 120, c8},
      {9, "exponential bound audit", 60, c9},
      {10, "K_f monotone vanishing", 120, c10},
      {11, "bound-state decay", 900, c11},
      {12, "jump decomposition", 300, c12},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    o.detail.precision(4);
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail << " [over time budget " << c.budget_seconds << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("C%-2d %s  %-40s %7.2fs  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
