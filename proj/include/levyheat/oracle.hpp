#pragma once

#include <cmath>
#include <vector>

#include "levyheat/grid.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"
#include "levyheat/util.hpp"

namespace levyheat {
namespace oracle {

// ---------------------------------------------------------------------------
// Cauchy family: the d=1 jump density |z|^{-2} generates the exponent π|ξ|
// (∫(1-cos u)u^{-2} du = π), whose kernel is t / ((πt)² + x²).
// ---------------------------------------------------------------------------

inline double cauchy_pdf(double t, double x) { return t / (sqr(pi * t) + x * x); }

inline double cauchy_dx(double t, double x) { return -2.0 * x * t / sqr(sqr(pi * t) + x * x); }

inline double cauchy_dt(double t, double x) {
  double den = sqr(pi * t) + x * x;
  return (den - t * 2.0 * pi * pi * t) / sqr(den);
}

// Exact periodization Σ_m cauchy_pdf(t, x+2Lm): geometric resummation of the
// torus Fourier series Σ_k e^{-πt|kπ/L|} e^{ikπx/L} / (2L).
inline double cauchy_torus(double t, double x, double L) {
  double a = pi * pi * t / L, b = pi * x / L;
  return (1.0 / (2.0 * L)) * std::sinh(a) / (std::cosh(a) - std::cos(b));
}

// ---------------------------------------------------------------------------
// Closed forms for the pure power density r^{-d-alpha}.
// ---------------------------------------------------------------------------

inline double stable_K(int d, double alpha, double r) {
  return sphere_surface(d) * std::pow(r, -alpha) / (2.0 - alpha);
}

inline double stable_tail(int d, double alpha, double r) {
  return sphere_surface(d) * std::pow(r, -alpha) / alpha;
}

inline double stable_h(int d, double alpha, double r) {
  return sphere_surface(d) * std::pow(r, -alpha) * (1.0 / (2.0 - alpha) + 1.0 / alpha);
}

inline double stable_h_inv(int d, double alpha, double u) {
  return std::pow(stable_h(d, alpha, 1.0) / u, 1.0 / alpha);
}

// One-dimensional symmetric stable exponent constant: ψ(ξ) = c_α |ξ|^α with
// c_α = 2∫_0^∞ (1-cos u) u^{-1-α} du = -2Γ(-α)cos(πα/2), c_1 = π.
inline double stable_psi_coeff_1d(double alpha) {
  if (std::abs(alpha - 1.0) < 1e-12) return pi;
  return -2.0 * std::tgamma(-alpha) * std::cos(pi * alpha / 2);
}

// Two-dimensional isotropic analogue for the density |z|^{-2-α}:
// ψ(ξ) = c |ξ|^α with c = 2π ∫_0^∞ (1-J0(u)) u^{-1-α} du
//       = 2π Γ(1-α/2) / (2^α α Γ(1+α/2)); c = 2π at α = 1.
inline double stable_psi_coeff_2d(double alpha) {
  return 2.0 * pi * std::tgamma(1.0 - alpha / 2) /
         (std::pow(2.0, alpha) * alpha * std::tgamma(1.0 + alpha / 2));
}

// Exponent of the d=1 tempered density e^{-r} r^{-2} (both half-lines):
// 2∫_0^∞ (1-cos(s r)) e^{-r} r^{-2} dr = 2 [s arctan s - ½ log(1+s²)],
// from d/ds ∫ (1-cos(sr)) e^{-r}/r² dr = ∫ sin(sr) e^{-r}/r dr = arctan s.
inline double tempered_psi_1d(double s) {
  return 2.0 * (s * std::atan(s) - 0.5 * std::log1p(s * s));
}

// Half-line sine transforms of the pure power r^{-1-α}:
//   ∫_0^∞ sin(u r) r^{-1-α} dr        = u^α Γ(1-α) sin(πα/2) / α,   α ∈ (0,1)
//   ∫_0^∞ (sin(u r) - u r) r^{-1-α} dr = -u^α Γ(2-α) sin(πα/2) / (α(α-1)),
//                                                                   α ∈ (1,2)
inline double stable_sin_coeff(double alpha) {
  return std::tgamma(1.0 - alpha) * std::sin(pi * alpha / 2) / alpha;
}
inline double stable_sin_comp_coeff(double alpha) {
  return -std::tgamma(2.0 - alpha) * std::sin(pi * alpha / 2) / (alpha * (alpha - 1.0));
}

// Direct Riemann-sum periodic convolution (f * g)[x] = Σ_w f[w] g[x-w] Δx^d,
// deliberately transform-free so spectral results have an independent witness.
inline std::vector<double> riemann_convolution(const SpaceGrid& g, const std::vector<double>& f,
                                               const std::vector<double>& gg) {
  require_config(f.size() == g.size() && gg.size() == g.size(),
                 "convolution operands must live on the given lattice");
  int n = g.n;
  std::vector<double> out(g.size(), 0.0);
  if (g.d == 1) {
    for (int x = 0; x < n; ++x) {
      double s = 0;
      for (int w = 0; w < n; ++w) s += f[std::size_t(w)] * gg[std::size_t(g.wrap_index(x - w))];
      out[std::size_t(x)] = s * g.cell();
    }
    return out;
  }
  for (int x0 = 0; x0 < n; ++x0)
    for (int x1 = 0; x1 < n; ++x1) {
      double s = 0;
      for (int w0 = 0; w0 < n; ++w0) {
        int d0 = g.wrap_index(x0 - w0);
        const double* fr = f.data() + std::size_t(w0) * n;
        const double* gr = gg.data() + std::size_t(d0) * n;
        for (int w1 = 0; w1 < n; ++w1) s += fr[w1] * gr[std::size_t(g.wrap_index(x1 - w1))];
      }
      out[std::size_t(x0) * n + x1] = s * g.cell();
    }
  return out;
}

// Direct oscillatory evaluation of (2π)^{-1} ∫ e^{-iξx} e^{-tψ(|ξ|)} dξ in
// d=1 for an even exponent given as a callable. Integrates per oscillation
// half-period; reference-grade, O(|x| ξ_max) cost.
template <class Psi>
double fourier_inverse_1d(Psi&& psi, double t, double x, double tol = 1e-10) {
  // find the cut where e^{-t psi} is negligible
  double xi_max = 1.0;
  int guard = 0;
  while (std::exp(-t * psi(xi_max)) > 1e-18) {
    xi_max *= 2;
    require_numeric(++guard < 120, "exponent does not grow: inversion cut not found");
  }
  double ax = std::abs(x);
  auto f = [&](double xi) { return std::exp(-t * psi(xi)) * std::cos(xi * ax); };
  double total = 0;
  if (ax * xi_max < 20) {
    total = integrate_refine(f, 0.0, xi_max, tol, 16);
  } else {
    double step = pi / ax;  // half period
    double lo = 0;
    int k = 0;
    while (lo < xi_max) {
      double hi = std::min(lo + step, xi_max);
      total += integrate_gl(f, lo, hi, 8);
      lo = hi;
      ++k;
      require_numeric(k < 4000000, "oscillatory inversion: too many periods");
    }
  }
  return total / pi;
}

}  // namespace oracle
}  // namespace levyheat
