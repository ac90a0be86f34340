#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "levyheat/util.hpp"

namespace levyheat {

struct GlRule {
  std::vector<double> x, w;  // nodes/weights on [-1, 1]
};

// Gauss-Legendre nodes by Newton iteration on P_k; cached per order.
inline const GlRule& gl_rule(int k) {
  static std::map<int, GlRule> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  GlRule r;
  r.x.resize(k);
  r.w.resize(k);
  for (int i = 0; i < k; ++i) {
    double x = std::cos(pi * (i + 0.75) / (k + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = k * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1, p1 = x;
    for (int j = 2; j <= k; ++j) {
      double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = k * (x * p1 - p0) / (x * x - 1);
    r.x[k - 1 - i] = x;
    r.w[k - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(k, std::move(r)).first->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int k = 8) {
  const GlRule& r = gl_rule(k);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
  for (int i = 0; i < k; ++i) s += r.w[i] * f(mid + half * r.x[i]);
  return s * half;
}

// Doubling refinement on a fixed interval: GL on 2^m equal panels until the
// change drops below tol (relative to a running scale), hard level cap.
template <class F>
double integrate_refine(F&& f, double a, double b, double tol, int k = 8, int max_levels = 20) {
  if (!(b > a)) return 0;
  double prev = integrate_gl(f, a, b, k);
  int panels = 2;
  for (int lvl = 0; lvl < max_levels; ++lvl) {
    double s = 0, h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) s += integrate_gl(f, a + p * h, a + (p + 1) * h, k);
    double scale = std::max({1.0, std::abs(s), std::abs(prev)});
    if (std::abs(s - prev) <= tol * scale) return s;
    prev = s;
    panels *= 2;
  }
  fail_numeric("quadrature did not converge within the level cap");
}

// ∫_a^b f with f ~ (r-a)^{sing} g(r) near a, sing > -1: substitute
// r = a + u^{1/theta} with theta = (1+sing)/2 so the transformed integrand
// vanishes linearly at 0, then refine.
template <class F>
double integrate_power_singular(F&& f, double a, double b, double sing, double tol, int k = 8) {
  if (!(b > a)) return 0;
  require_numeric(sing > -1.0, "non-integrable endpoint singularity");
  double theta = 0.5 * (1.0 + sing);
  double ub = std::pow(b - a, theta);
  auto g = [&](double u) {
    double r = a + std::pow(u, 1.0 / theta);
    return f(r) * std::pow(u, 1.0 / theta - 1.0) / theta;
  };
  return integrate_refine(g, 0.0, ub, tol, k);
}

// ∫_a^b via geometric panels from a: resolves integrands whose scale of
// variation is proportional to r (power-law decay) on very wide ranges.
template <class F>
double integrate_geometric(F&& f, double a, double b, double tol, int k = 8) {
  if (!(b > a)) return 0;
  require_numeric(a > 0, "geometric panels need a positive start");
  double total = 0, lo = a;
  while (lo < b) {
    double hi = std::min(lo * 2, b);
    total += integrate_refine(f, lo, hi, tol, k, 16);
    lo = hi;
  }
  return total;
}

// ∫_a^∞ f via geometric panels [a·2^j, a·2^{j+1}]; stops when panels stop
// contributing. Integrand must decay; the level cap reports otherwise.
template <class F>
double integrate_tail(F&& f, double a, double tol, int k = 8, int max_panels = 200) {
  require_numeric(a > 0, "tail integration needs a positive start");
  double total = 0, lo = a;
  for (int j = 0; j < max_panels; ++j) {
    double hi = lo * 2;
    double s = integrate_refine(f, lo, hi, tol, k, 16);
    total += s;
    if (std::abs(s) <= tol * std::max(1e-300, std::abs(total)) && j > 2) return total;
    lo = hi;
  }
  fail_numeric("tail quadrature did not converge (integrand decays too slowly)");
}

// Euler transform of a sequence of partial sums of an (asymptotically)
// alternating series: repeated pairwise averaging, read off the deepest row.
inline double euler_limit(const std::vector<double>& partial) {
  std::vector<double> row = partial;
  while (row.size() > 1) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
    row.pop_back();
  }
  return row[0];
}

// ∫_a^∞ f(r)·osc(r) dr where osc oscillates with the given half-period and f
// is smooth and decaying: one GL panel per half-period, partial sums
// accelerated by Euler's transformation. Start a at or beyond ~one half-period
// so the panels alternate from the beginning.
template <class F, class O>
double osc_tail(F&& f, O&& osc, double half_period, double a, double tol, int k = 8,
                int max_panels = 400) {
  require_numeric(half_period > 0, "oscillatory tail needs a positive half-period");
  std::vector<double> partial;
  partial.reserve(64);
  double accum = 0, prev_est = 0;
  auto g = [&](double r) { return f(r) * osc(r); };
  for (int j = 0; j < max_panels; ++j) {
    accum += integrate_gl(g, a + j * half_period, a + (j + 1) * half_period, k);
    partial.push_back(accum);
    if (partial.size() >= 8 && partial.size() % 2 == 0) {
      double est = euler_limit(partial);
      if (std::abs(est - prev_est) <= tol * std::max(1.0, std::abs(est))) return est;
      prev_est = est;
    }
  }
  fail_numeric("oscillatory tail did not settle within the panel cap");
}

// Tanh-sinh (double-exponential) rule on [a,b]: node count doubles per level
// until two levels agree. Converges geometrically even when the integrand has
// algebraic endpoint singularities, which defeat fixed Gauss panels.
template <class F>
double tanh_sinh(F&& f, double a, double b, double tol, int max_level = 8) {
  if (!(b > a)) return 0;
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double t_max = 3.2;
  auto eval = [&](double t) {
    double s = 0.5 * pi * std::sinh(t);
    double x = std::tanh(s);
    double xx = mid + half * x;
    if (xx <= a || xx >= b) return 0.0;  // node underflowed onto the boundary
    double w = 0.5 * pi * std::cosh(t) / sqr(std::cosh(s));
    return f(xx) * w;
  };
  double h = 1.0;
  double sum = eval(0.0);
  for (int j = 1; j * h <= t_max; ++j) sum += eval(j * h) + eval(-j * h);
  double prev = sum * h * half;
  for (int lvl = 1; lvl <= max_level; ++lvl) {
    h *= 0.5;
    for (int j = 1; j * h <= t_max; j += 2) sum += eval(j * h) + eval(-j * h);
    double cur = sum * h * half;
    if (lvl >= 2 && std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  fail_numeric("double-exponential quadrature did not settle");
}

// ∫_a^∞ w(r)·cos(c·r) dr for decaying w and any frequency c ≥ 0. The stretch
// up to the first half-period boundary past `a` is integrated with plain
// panels (geometric when it spans many octaves, as happens for small c); from
// that boundary on the panels alternate in sign and Euler acceleration
// applies.
template <class W>
double cos_tail(W&& w, double c, double a, double tol, int k = 8) {
  if (!(c > 0)) return integrate_tail(w, a, tol, k);
  auto f = [&](double r) { return w(r) * std::cos(c * r); };
  double h = pi / c;
  double start = std::ceil(a / h) * h;
  double slow = 0;
  if (start > a)
    slow = start > 4 * a ? integrate_geometric(f, a, start, tol, k)
                         : integrate_refine(f, a, start, tol, k);
  return slow + osc_tail(w, [c](double r) { return std::cos(c * r); }, h, start, tol, k);
}

// ∫_a^b f(r)·osc(r) dr over a finite range: plain half-period panel sum.
template <class F, class O>
double osc_range(F&& f, O&& osc, double half_period, double a, double b, double tol, int k = 8) {
  if (!(b > a)) return 0;
  auto g = [&](double r) { return f(r) * osc(r); };
  double n_half = (b - a) / half_period;
  if (n_half <= 8) return integrate_refine(g, a, b, tol, k);
  double total = 0, lo = a;
  while (lo < b) {
    double hi = std::min(lo + half_period, b);
    total += integrate_gl(g, lo, hi, k);
    lo = hi;
  }
  return total;
}

// Graded panel breakpoints for ∫_0^t with integrable endpoint singularities at
// both ends: geometric with the given ratio from each end toward the middle,
// starting at width `edge`. Returns interior breakpoints including 0 and t.
inline std::vector<double> graded_breaks(double t, double edge, double ratio = 2.0) {
  std::vector<double> left{0.0}, right{t};
  double w = edge, pos = 0;
  while (pos + w < 0.5 * t) {
    pos += w;
    left.push_back(pos);
    w *= ratio;
  }
  w = edge;
  pos = t;
  while (pos - w > 0.5 * t) {
    pos -= w;
    right.push_back(pos);
    w *= ratio;
  }
  left.insert(left.end(), right.rbegin(), right.rend());
  std::sort(left.begin(), left.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  return left;
}

}  // namespace levyheat
