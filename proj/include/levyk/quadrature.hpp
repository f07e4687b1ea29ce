#pragma once

// Quadrature primitives shared by every module: a globally adaptive
// Gauss-Kronrod driver, double-exponential rules for endpoint singularities
// and half-infinite ranges, and acceleration of alternating panel sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace levyk::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  double l1 = 0.0;  // integral of |f|, the scale of achievable accuracy

  Result& operator+=(const Result& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    l1 += o.l1;
    return *this;
  }
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_intervals = 4000;
};

/// Single 10/21-point Gauss-Kronrod panel.
template <class F>
Result gk_panel(const F& f, double a, double b) {
  Result r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, a, b, 0, 0.0, &r.error, &r.l1);
  // Boost reports the unrefined error on the reference interval [-1, 1].
  r.error *= 0.5 * std::abs(b - a);
  return r;
}

/// Globally adaptive Gauss-Kronrod on a finite interval: the interval with the
/// largest error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol*|value|, 50 eps * L1), the last term being the rounding
/// floor for integrands that cancel.
template <class F>
Result adaptive(const F& f, double a, double b, const Options& opt = {}) {
  struct Piece {
    double a, b;
    Result r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  if (a == b) return {};
  std::priority_queue<Piece> heap;
  Result total = gk_panel(f, a, b);
  heap.push({a, b, total});
  int count = 1;
  constexpr double kFloor = 50.0 * std::numeric_limits<double>::epsilon();
  while (total.error > std::max({opt.abs_tol, opt.rel_tol * std::abs(total.value), kFloor * total.l1})) {
    if (count >= opt.max_intervals) {
      total.converged = false;
      break;
    }
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      total.converged = false;
      break;
    }
    heap.pop();
    Piece left{worst.a, mid, gk_panel(f, worst.a, mid)};
    Piece right{mid, worst.b, gk_panel(f, mid, worst.b)};
    total.value += left.r.value + right.r.value - worst.r.value;
    total.error += left.r.error + right.r.error - worst.r.error;
    total.l1 += left.r.l1 + right.r.l1 - worst.r.l1;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Recompute from the pieces to shed accumulated rounding in the updates.
  Result exact;
  exact.converged = total.converged;
  while (!heap.empty()) {
    exact.value += heap.top().r.value;
    exact.error += heap.top().r.error;
    exact.l1 += heap.top().r.l1;
    heap.pop();
  }
  return exact;
}

/// Integral over [a, b] with an integrable endpoint singularity.
template <class F>
Result endpoint_singular(const F& f, double a, double b, double tol = 1e-12) {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  Result r;
  double l1 = 0.0;
  r.value = rule.integrate(f, a, b, tol, &r.error, &l1);
  r.l1 = l1;
  r.converged = r.error <= std::max(1e-300, 1e3 * tol * l1);
  return r;
}

/// Integral over [a, inf) for integrands decaying at least algebraically.
template <class F>
Result half_line(const F& f, double a, double tol = 1e-12) {
  static thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  Result r;
  double l1 = 0.0;
  r.value = rule.integrate(f, a, std::numeric_limits<double>::infinity(), tol,
                           &r.error, &l1);
  r.l1 = l1;
  r.converged = r.error <= std::max(1e-300, 1e3 * tol * l1);
  return r;
}

/// Fixed N-point Gauss-Legendre rule.
template <std::size_t N, class F>
double gauss_legendre(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

struct Accelerated {
  double value;
  double error;
};

/// Iterated averaging of the partial sums of an alternating-panel series:
/// each sweep replaces neighbouring partial sums by their mean. With n
/// partial sums the depth is n - 1.
Accelerated iterated_average(std::span<const double> partial_sums);

/// Sum of panel integrals I_k, k = 0, 1, ..., whose signs alternate and whose
/// magnitudes vary smoothly. Panels are integrated until `min_panels` have been
/// taken and the panel terms are negligible, or until `max_panels`; once past
/// `min_panels` the last (depth+1) partial sums are accelerated. `panel(k)`
/// must return the k-th panel integral.
template <class Panel>
Result alternating_panel_sum(const Panel& panel, int min_panels,
                             int max_panels = 200000, int depth = 12,
                             double negligible = 1e-17) {
  Result total;
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(min_panels + depth + 2));
  double running = 0.0;
  double scale = 0.0;
  int quiet = 0;
  for (int k = 0; k < max_panels; ++k) {
    const Result p = panel(k);
    running += p.value;
    total.error += p.error;
    total.converged = total.converged && p.converged;
    scale = std::max(scale, std::abs(running));
    quiet = std::abs(p.value) <= negligible * scale ? quiet + 1 : 0;
    if (k + 1 >= min_panels && quiet >= 3) {
      total.value = running;
      return total;
    }
    if (k + 1 >= min_panels) {
      sums.push_back(running);
      if (static_cast<int>(sums.size()) == depth + 1) {
        const Accelerated acc = iterated_average(sums);
        total.value = acc.value;
        total.error += acc.error;
        return total;
      }
    }
  }
  total.value = running;
  total.converged = false;
  return total;
}

}  // namespace levyk::quad
