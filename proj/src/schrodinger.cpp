#include "levyk/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/format.hpp"
#include "levyk/kernels.hpp"
#include "levyk/parallel.hpp"

namespace levyk {

namespace {

constexpr int kNearOffsets = 8;
constexpr double kAlphaMin = 1e-6;

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kGl[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGlW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double cell_average(const PotentialSpec& v, double a, double b) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareWell>) {
          const double overlap = std::max(0.0, std::min(b, p.radius) - std::max(a, -p.radius));
          return p.depth * overlap / (b - a);
        } else if constexpr (std::is_same_v<T, GaussianWell>) {
          const double s = std::sqrt(2.0) * p.width;
          return p.depth * std::sqrt(M_PI / 2.0) * p.width * (std::erf(b / s) - std::erf(a / s)) / (b - a);
        } else {
          std::vector<double> cuts{a};
          for (double g : p.grid)
            if (g > a && g < b) cuts.push_back(g);
          cuts.push_back(b);
          double sum = 0.0;
          for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            sum += 0.5 * (cuts[i + 1] - cuts[i]) *
                   (std::abs(potential_value(v, cuts[i])) + std::abs(potential_value(v, cuts[i + 1])));
          return sum / (b - a);
        }
      },
      v);
}

// W_n = int over the cell of node n of g_alpha(u) du, n >= 0: differences of
// the cumulative integral near the diagonal, 3-point Gauss-Legendre beyond.
std::vector<double> toeplitz_weights(const LevyModel& m, double alpha, double h, int n_max) {
  std::vector<double> w(static_cast<std::size_t>(n_max) + 1);
  const int near = std::min(n_max, kNearOffsets);
  std::vector<double> cum(static_cast<std::size_t>(near) + 1);
  parallel_for(cum.size(), [&](std::size_t k) { cum[k] = resolvent_cumulative(m, alpha, (k + 0.5) * h); });
  w[0] = 2.0 * cum[0];
  for (int n = 1; n <= near; ++n) w[static_cast<std::size_t>(n)] = cum[static_cast<std::size_t>(n)] - cum[static_cast<std::size_t>(n) - 1];
  if (n_max > near) {
    std::vector<double> pts;
    pts.reserve(3 * static_cast<std::size_t>(n_max - near));
    for (int n = near + 1; n <= n_max; ++n)
      for (double xi : kGl) pts.push_back((n + 0.5 * xi) * h);
    const KernelGrid g = resolvent_freq(m, alpha, pts);
    for (int n = near + 1; n <= n_max; ++n) {
      const std::size_t base = 3 * static_cast<std::size_t>(n - near - 1);
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += kGlW[k] * g.values[base + static_cast<std::size_t>(k)];
      w[static_cast<std::size_t>(n)] = 0.5 * h * s;
    }
  }
  return w;
}

struct Support {
  int lo = 0, hi = -1;  // node index range with nonzero cell-averaged |V|
  std::vector<double> d;  // cell averages of |V| on [lo, hi]
  int size() const { return hi - lo + 1; }
};

Support support_nodes(const PotentialSpec& v, double h) {
  const auto [a, b] = potential_support(v);
  Support s;
  if (!(b > a)) return s;
  s.lo = static_cast<int>(std::floor(a / h + 0.5));
  s.hi = static_cast<int>(std::ceil(b / h - 0.5));
  for (int i = s.lo; i <= s.hi; ++i) s.d.push_back(cell_average(v, (i - 0.5) * h, (i + 0.5) * h));
  while (s.size() > 0 && s.d.front() == 0.0) {
    s.d.erase(s.d.begin());
    ++s.lo;
  }
  while (s.size() > 0 && s.d.back() == 0.0) {
    s.d.pop_back();
    --s.hi;
  }
  return s;
}

// Symmetric form D^{1/2} W D^{1/2} restricted to the support.
Eigen::MatrixXd symmetric_matrix(const Support& s, const std::vector<double>& w) {
  const int n = s.size();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = std::sqrt(s.d[static_cast<std::size_t>(i)] * s.d[static_cast<std::size_t>(j)]) *
                w[static_cast<std::size_t>(std::abs(i - j))];
  return a;
}

struct PowerResult {
  double mu = 0.0;
  Eigen::VectorXd vec;
  int iterations = 0;
  bool converged = true;
};

PowerResult power_iteration(const Eigen::MatrixXd& a) {
  PowerResult r;
  r.vec = Eigen::VectorXd::Ones(a.rows()).normalized();
  double previous = 0.0;
  for (int it = 1; it <= 100000; ++it) {
    Eigen::VectorXd next = a * r.vec;
    const double mu = r.vec.dot(next);
    const double norm = next.norm();
    if (norm == 0.0) {
      r.mu = 0.0;
      r.iterations = it;
      return r;
    }
    const double residual = (next - mu * r.vec).norm();
    r.vec = next / norm;
    r.mu = mu;
    r.iterations = it;
    if (residual <= 1e-10 * mu && std::abs(mu - previous) <= 1e-12 * mu) return r;
    previous = mu;
  }
  r.converged = false;
  return r;
}

struct SupportSolve {
  Support s;
  std::vector<double> w;
  PowerResult power;
};

SupportSolve solve_support(const LevyModel& m, const PotentialSpec& v, double alpha, double h) {
  SupportSolve out;
  out.s = support_nodes(v, h);
  if (out.s.size() == 0) return out;
  out.w = toeplitz_weights(m, alpha, h, out.s.size() - 1);
  out.power = power_iteration(symmetric_matrix(out.s, out.w));
  return out;
}

// phi on |i| <= n from phi on the support: phi = K phi / mu.
std::vector<double> extend(const SupportSolve& sol, const std::vector<double>& w, int n) {
  const Support& s = sol.s;
  std::vector<double> src(static_cast<std::size_t>(s.size()));
  for (int j = 0; j < s.size(); ++j)
    src[static_cast<std::size_t>(j)] = std::sqrt(s.d[static_cast<std::size_t>(j)]) * sol.power.vec[j];
  std::vector<double> phi(2 * static_cast<std::size_t>(n) + 1, 0.0);
  parallel_for(phi.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) - n;
    double acc = 0.0;
    for (int j = 0; j < s.size(); ++j) acc += w[static_cast<std::size_t>(std::abs(i - s.lo - j))] * src[static_cast<std::size_t>(j)];
    phi[k] = acc / sol.power.mu;
  });
  double norm = 0.0;
  for (double p : phi) norm += p * p;
  norm = std::sqrt(norm);
  for (double& p : phi) p /= norm;
  return phi;
}

void check_grid(const LevyModel& m, const BsGrid& grid) {
  if (m.dim() != 1) throw DomainError("schrodinger: only d = 1 is supported");
  if (!(grid.h > 0.0)) throw DomainError("schrodinger: grid spacing must be positive");
  if (!(grid.half_width >= 0.0)) throw DomainError("schrodinger: half width must be non-negative");
}

int node_count(double half_width, double h) { return static_cast<int>(std::ceil(half_width / h - 1e-9)); }

}  // namespace

void validate_potential(const PotentialSpec& v) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareWell>) {
          if (!(p.depth >= 0.0 && p.radius > 0.0)) throw DomainError("square well: depth >= 0 and radius > 0 required");
        } else if constexpr (std::is_same_v<T, GaussianWell>) {
          if (!(p.depth >= 0.0 && p.width > 0.0)) throw DomainError("gaussian well: depth >= 0 and width > 0 required");
        } else {
          if (p.grid.size() != p.values.size() || p.grid.size() < 2)
            throw DomainError("tabulated potential: grid and values must align (>= 2 nodes)");
          if (!std::is_sorted(p.grid.begin(), p.grid.end()) ||
              std::adjacent_find(p.grid.begin(), p.grid.end()) != p.grid.end())
            throw DomainError("tabulated potential: grid must be strictly ascending");
          double peak = 0.0;
          for (double x : p.values) {
            if (!(x <= 0.0)) throw DomainError("tabulated potential: values must be <= 0");
            peak = std::max(peak, -x);
          }
          if (std::abs(p.values.front()) > 1e-6 * peak || std::abs(p.values.back()) > 1e-6 * peak)
            throw DomainError("tabulated potential: values must vanish at both ends of the grid");
        }
      },
      v);
}

double potential_value(const PotentialSpec& v, double x) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareWell>) {
          return std::abs(x) < p.radius ? -p.depth : 0.0;
        } else if constexpr (std::is_same_v<T, GaussianWell>) {
          return -p.depth * std::exp(-x * x / (2.0 * p.width * p.width));
        } else {
          if (x <= p.grid.front() || x >= p.grid.back()) return 0.0;
          const auto it = std::upper_bound(p.grid.begin(), p.grid.end(), x);
          const std::size_t k = static_cast<std::size_t>(it - p.grid.begin());
          const double t = (x - p.grid[k - 1]) / (p.grid[k] - p.grid[k - 1]);
          return (1.0 - t) * p.values[k - 1] + t * p.values[k];
        }
      },
      v);
}

std::pair<double, double> potential_support(const PotentialSpec& v) {
  return std::visit(
      [](const auto& p) -> std::pair<double, double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareWell>) {
          if (p.depth == 0.0) return {0.0, 0.0};
          return {-p.radius, p.radius};
        } else if constexpr (std::is_same_v<T, GaussianWell>) {
          if (p.depth == 0.0) return {0.0, 0.0};
          const double r = p.width * std::sqrt(2.0 * std::log(1e16));
          return {-r, r};
        } else {
          std::size_t first = p.values.size(), last = 0;
          for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (p.values[i] != 0.0) {
              first = std::min(first, i);
              last = i;
            }
          }
          if (first == p.values.size()) return {0.0, 0.0};
          return {p.grid[first == 0 ? 0 : first - 1], p.grid[std::min(last + 1, p.grid.size() - 1)]};
        }
      },
      v);
}

BsEigen bs_eigenvalue(const LevyModel& model, const PotentialSpec& v, double alpha, const BsGrid& grid,
                      bool dense_check) {
  check_grid(model, grid);
  validate_potential(v);
  if (!(alpha > 0.0)) throw DomainError("bs_eigenvalue: alpha must be positive");
  const SupportSolve sol = solve_support(model, v, alpha, grid.h);
  const auto [a, b] = potential_support(v);
  const int n = node_count(std::max({grid.half_width, std::abs(a), std::abs(b)}), grid.h);
  BsEigen out;
  out.x.resize(2 * static_cast<std::size_t>(n) + 1);
  for (int i = -n; i <= n; ++i) out.x[static_cast<std::size_t>(i + n)] = i * grid.h;
  if (sol.s.size() == 0 || sol.power.mu == 0.0) {
    out.phi.assign(out.x.size(), 0.0);
    return out;
  }
  out.mu = sol.power.mu;
  out.iterations = sol.power.iterations;
  out.converged = sol.power.converged;
  const int reach = n + std::max(std::abs(sol.s.lo), std::abs(sol.s.hi));
  const std::vector<double> w = toeplitz_weights(model, alpha, grid.h, reach);
  out.phi = extend(sol, w, n);
  if (dense_check) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_matrix(sol.s, sol.w), Eigen::EigenvaluesOnly);
    out.dense_mu = es.eigenvalues().maxCoeff();
  }
  return out;
}

void BoundStateResult::write_csv(std::ostream& out) const {
  out << "x,phi\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << fmt17(x[i]) << ',' << fmt17(phi[i]) << '\n';
}

std::optional<BoundStateResult> find_bound_state(const LevyModel& model, const PotentialSpec& v,
                                                 const BsGrid& grid) {
  check_grid(model, grid);
  validate_potential(v);
  const double h = grid.h;
  auto mu = [&](double alpha) { return solve_support(model, v, alpha, h).power.mu; };

  double lo = 1.0, hi = 1.0;
  double mu_lo = mu(lo), mu_hi = mu_lo;
  if (mu_lo > 1.0) {
    do {
      lo = hi;
      mu_lo = mu_hi;
      hi *= 2.0;
      mu_hi = mu(hi);
      if (hi > 1e12) throw ConvergenceError("find_bound_state: mu(alpha) stays above 1", hi, 0.0);
    } while (mu_hi > 1.0);
  } else {
    do {
      hi = lo;
      mu_hi = mu_lo;
      lo *= 0.5;
      if (lo < kAlphaMin) return std::nullopt;
      mu_lo = mu(lo);
    } while (mu_lo <= 1.0);
  }

  double best_residual = std::numeric_limits<double>::infinity(), alpha = 0.5 * (lo + hi);
  auto f = [&](double a) {
    const double m = mu(a);
    if (std::abs(m - 1.0) < best_residual) {
      best_residual = std::abs(m - 1.0);
      alpha = a;
    }
    return std::log(m);
  };
  auto tol = [&](double a, double b) {
    return best_residual <= 1e-8 || std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * b;
  };
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, std::log(mu_lo), std::log(mu_hi), tol, iters);

  BoundStateResult out;
  const SupportSolve sol = solve_support(model, v, alpha, h);
  out.lambda = -alpha;
  {
    const double da = 1e-6 * alpha;
    const double slope = (mu(alpha + da) - sol.power.mu) / da;
    out.lambda_error = slope != 0.0 ? std::abs(sol.power.mu - 1.0) / std::abs(slope) : bracket.second - bracket.first;
  }
  out.mu_residual = std::abs(sol.power.mu - 1.0);
  out.converged = sol.power.converged && out.mu_residual <= 1e-8;
  out.h = h;

  const auto [a, b] = potential_support(v);
  const double edge = std::max(std::abs(a), std::abs(b));
  std::optional<double> rate;
  if (model.kappa()) {
    const std::vector<double> theta{1.0};
    rate = gamma_alpha(model, alpha, theta);
    out.predicted_rate = *rate;
  } else {
    out.predicted_rate = std::numeric_limits<double>::quiet_NaN();
  }
  double half_width = grid.half_width;
  if (half_width == 0.0) {
    half_width = rate ? edge + 12.0 * std::log(10.0) / *rate : std::max(100.0, 50.0 * edge);
    half_width = std::min(half_width, 200.0);
  }
  half_width = std::max(half_width, edge);
  const int n = node_count(half_width, h);
  out.half_width = n * h;
  out.x.resize(2 * static_cast<std::size_t>(n) + 1);
  for (int i = -n; i <= n; ++i) out.x[static_cast<std::size_t>(i + n)] = i * h;
  const int reach = n + std::max(std::abs(sol.s.lo), std::abs(sol.s.hi));
  out.phi = extend(sol, toeplitz_weights(model, alpha, h, reach), n);

  // Tail fit on the positive side beyond twice the support.
  std::vector<double> tx, tv;
  const double x_lo = std::max(5.0, 2.0 * edge);
  const int stride = std::max(1, static_cast<int>(std::round(0.25 / h)));
  for (int i = 0; i <= n; i += stride) {
    const double x = i * h;
    const double p = out.phi[static_cast<std::size_t>(i + n)];
    if (x >= x_lo && p > 1e-280) {
      tx.push_back(x);
      tv.push_back(p);
    }
  }
  FitOptions fo;
  fo.x_lo = x_lo;
  out.tail_fit = rate ? fit_exponential_rate(tx, tv, true, fo) : fit_powerlaw(tx, tv, fo);
  return out;
}

GroundStateProfileReport ground_state_profile_report(const BoundStateResult& result, const LevyModel& model,
                                                     double x_lo, double x_hi) {
  if (model.kappa())
    throw UnsupportedProfile("ground_state_profile_report: profile is exponential, not subexponential");
  std::vector<double> xs, num, den;
  for (std::size_t i = 0; i < result.x.size(); ++i) {
    const double x = std::abs(result.x[i]);
    if (x < x_lo || x > x_hi) continue;
    xs.push_back(x);
    num.push_back(result.phi[i]);
    den.push_back(model.profile_at(x));
  }
  GroundStateProfileReport rep;
  rep.window_too_small = xs.size() < 20;
  if (xs.empty()) throw DomainError("ground_state_profile_report: empty window");
  rep.ratio = ratio_report(xs, num, den, x_lo, x_hi);
  return rep;
}

}  // namespace levyk
