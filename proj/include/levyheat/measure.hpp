#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"
#include "levyheat/util.hpp"

namespace levyheat {

// Radial integral ∫_{|z|<r} (|z|²/r²) J dz + ∫_{|z|≥r} J dz, the decay
// profile h; its inverse drives every time-to-length conversion.
//
// Angular factors average to their sphere mean here; h, K and everything
// built on them only see the isotropic part (the bounded factor moves into
// the comparability constant).

namespace detail {

// Local power of nu at small r; rejects densities whose second moment
// diverges at the origin before any quadrature runs off a cliff.
inline void check_origin_admissible(const LevyProfile& p) {
  double r0 = 1e-7, r1 = 2e-7;
  double e = std::log(p.nu(r1) / p.nu(r0)) / std::log(r1 / r0);
  require_numeric(e > -double(p.d) - 2.0 + 1e-9,
                  "jump density too singular at the origin: second moment diverges");
}

inline double quad_tol_measure() { return 1e-12; }

}  // namespace detail

// K(r) = r^{-2} ∫_{|z|<r} |z|² J(z) dz.
inline double K_of(const LevyProfile& p, double r) {
  require_numeric(r > 0, "K is defined for r > 0");
  detail::check_origin_admissible(p);
  double s_d = sphere_surface(p.d);
  double hi = std::min(r, p.support_radius);
  if (hi <= 0) return 0;
  // integrand rho^{d+1} nu(rho) ~ rho^{d+1-d-sing} = rho^{1-sing}
  double core = integrate_power_singular([&](double rho) { return std::pow(rho, p.d + 1) * p.nu(rho); },
                                         0.0, hi, 1.0 - p.sing_hint, detail::quad_tol_measure());
  return s_d * core / (r * r);
}

// Tail mass ∫_{|z|≥r} J dz.
inline double nu_tail(const LevyProfile& p, double r) {
  require_numeric(r > 0, "tail is defined for r > 0");
  if (r >= p.support_radius) return 0;
  if (p.tail_mass_override) return p.tail_mass_override(r);
  double s_d = sphere_surface(p.d);
  auto f = [&](double rho) { return rho >= p.support_radius ? 0.0 : std::pow(rho, p.d - 1) * p.nu(rho); };
  if (std::isfinite(p.support_radius))
    return s_d * integrate_refine(f, r, p.support_radius, detail::quad_tol_measure());
  return s_d * integrate_tail(f, r, detail::quad_tol_measure());
}

inline double h_of(const LevyProfile& p, double r) {
  return K_of(p, r) + nu_tail(p, r);
}

// h is continuous and strictly decreasing to 0; invert by bisection on log r
// with bracket expansion.
inline double h_inverse(const LevyProfile& p, double u) {
  require_numeric(u > 0, "h_inverse needs a positive level");
  double lo = 1.0, hi = 1.0;
  double hlo = h_of(p, lo);
  int guard = 0;
  while (hlo < u) {  // need smaller r
    lo *= 0.5;
    hlo = h_of(p, lo);
    require_numeric(++guard < 1200, "h_inverse bracket expansion failed (level too high)");
  }
  double hhi = h_of(p, hi);
  guard = 0;
  while (hhi > u) {
    hi *= 2;
    hhi = h_of(p, hi);
    require_numeric(++guard < 1200, "h_inverse bracket expansion failed (level too low)");
  }
  for (int it = 0; it < 200 && hi / lo > 1 + 1e-14; ++it) {
    double mid = std::sqrt(lo * hi);
    (h_of(p, mid) >= u ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

// rho_t(x) = [h^{-1}(1/t)]^{-d} ∧ t K(|x|) |x|^{-d}.
inline double bound_rho(const LevyProfile& p, double t, double r_abs) {
  require_numeric(t > 0, "bound_rho needs t > 0");
  double a = std::pow(h_inverse(p, 1.0 / t), -double(p.d));
  if (r_abs <= 0) return a;
  double b = t * K_of(p, r_abs) * std::pow(r_abs, -double(p.d));
  return std::min(a, b);
}

// Weighted envelope [h^{-1}(1/t)]^{gamma} (|x|^{beta} ∧ 1) t^{-1} rho_t(x).
inline double err_fn(const LevyProfile& p, double gamma, double beta, double t, double r_abs) {
  double hinv = h_inverse(p, 1.0 / t);
  double w = beta == 0.0 ? 1.0 : std::min(std::pow(r_abs, beta), 1.0);
  return std::pow(hinv, gamma) * w * bound_rho(p, t, r_abs) / t;
}

// Radius where the flat cap meets the tail branch, bracketed inside
// [h^{-1}(3/t), h^{-1}(1/t)].
inline double rho_crossover(const LevyProfile& p, double t) {
  double lo = h_inverse(p, 3.0 / t), hi = h_inverse(p, 1.0 / t);
  double cap = std::pow(hi, -double(p.d));
  auto excess = [&](double r) { return t * K_of(p, r) * std::pow(r, -double(p.d)) - cap; };
  double elo = excess(lo), ehi = excess(hi);
  // tiny numeric slack at the bracket ends; the bracket itself is the claim
  if (elo < 0 && excess(lo * (1 - 1e-9)) < 0) fail_numeric("crossover bracket violated at lower end");
  if (ehi > 0 && excess(hi * (1 + 1e-9)) > 0) fail_numeric("crossover bracket violated at upper end");
  if (elo <= 0) return lo;
  if (ehi >= 0) return hi;
  for (int it = 0; it < 200 && hi / lo > 1 + 1e-13; ++it) {
    double mid = std::sqrt(lo * hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

// ∫ rho_t dx. Tail reduces exactly: K(rho)/rho = -h'(rho)/2, so
// ∫_{|x|>r0} t K(|x|)/|x|^d dx = t s_d h(r0) / 2.
inline double rho_integral(const LevyProfile& p, double t) {
  double r0 = rho_crossover(p, t);
  double cap = std::pow(h_inverse(p, 1.0 / t), -double(p.d));
  return cap * ball_volume(p.d) * std::pow(r0, p.d) + t * sphere_surface(p.d) * h_of(p, r0) / 2;
}

// ∫ (|x|^beta ∧ 1) rho_t dx for beta ≥ 0.
inline double weighted_rho_integral(const LevyProfile& p, double beta, double t) {
  double r0 = rho_crossover(p, t);
  double cap = std::pow(h_inverse(p, 1.0 / t), -double(p.d));
  double s_d = sphere_surface(p.d);
  double a = std::min(r0, 1.0);
  // flat cap region, weight |x|^beta
  double total = cap * s_d * std::pow(a, beta + p.d) / (beta + p.d);
  if (r0 < 1.0) {
    // tail branch with weight rho^{beta}: t s_d ∫_{r0}^{1} rho^{beta-1} K drho
    total += t * s_d *
             integrate_refine([&](double rho) { return std::pow(rho, beta - 1) * K_of(p, rho); }, r0, 1.0,
                              1e-9, 8);
    total += t * s_d * h_of(p, 1.0) / 2;  // weight 1 beyond r=1
  } else {
    total += cap * ball_volume(p.d) * (std::pow(r0, p.d) - 1.0);  // weight 1, still under the cap
    total += t * s_d * h_of(p, r0) / 2;
  }
  return total;
}

// Tabulated evaluator: K and the tail mass on a log radius grid (built
// incrementally, one small panel per node, tail anchored analytically when
// the profile provides tail_mass), h = K + tail, inversion by monotone
// lookup. Direct quadrature stays the reference; property checks with many
// draws go through this.
class ProfileTables {
 public:
  explicit ProfileTables(const LevyProfile& p, double r_min = 1e-9, double r_max = 1e9,
                         int per_decade = 64)
      : p_(p) {
    detail::check_origin_admissible(p);
    int n = int(std::ceil(std::log10(r_max / r_min) * per_decade)) + 1;
    lr_.resize(n);
    lK_.resize(n);
    lh_.resize(n);
    std::vector<double> K(n), T(n);
    double s_d = sphere_surface(p.d);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = r_min * std::pow(r_max / r_min, double(i) / (n - 1));
    // second moment, incremental from the origin
    double m2 = integrate_power_singular([&](double rho) { return rho >= p.support_radius ? 0.0 : std::pow(rho, p.d + 1) * p.nu(rho); },
                                         0.0, r[0], 1.0 - p.sing_hint, 1e-12);
    K[0] = s_d * m2 / (r[0] * r[0]);
    for (int i = 1; i < n; ++i) {
      m2 += integrate_refine([&](double rho) { return rho >= p.support_radius ? 0.0 : std::pow(rho, p.d + 1) * p.nu(rho); },
                             r[i - 1], std::min(r[i], p.support_radius), 1e-12, 8);
      K[i] = s_d * m2 / (r[i] * r[i]);
    }
    // tail mass, incremental from the far anchor
    T[n - 1] = nu_tail_anchor(r[n - 1]);
    for (int i = n - 2; i >= 0; --i) {
      double add = 0;
      if (r[i] < p.support_radius)
        add = s_d * integrate_refine([&](double rho) { return rho >= p.support_radius ? 0.0 : std::pow(rho, p.d - 1) * p.nu(rho); },
                                     r[i], std::min(r[i + 1], p.support_radius), 1e-12, 8);
      T[i] = T[i + 1] + add;
    }
    for (int i = 0; i < n; ++i) {
      lr_[i] = std::log(r[i]);
      lK_[i] = std::log(std::max(K[i], 1e-300));
      lh_[i] = std::log(std::max(K[i] + T[i], 1e-300));
    }
    // a finite support radius leaves a derivative kink in K and h; keep
    // interpolation stencils on one side of it
    if (std::isfinite(p.support_radius)) {
      kink_lx_ = std::log(p.support_radius);
      kink_below_ = std::ptrdiff_t(std::upper_bound(lr_.begin(), lr_.end(), kink_lx_) - lr_.begin()) - 1;
    }
  }

  const LevyProfile& profile() const { return p_; }

  double K(double r) const { return std::exp(interp(lK_, std::log(r))); }
  double h(double r) const { return std::exp(interp(lh_, std::log(r))); }

  double h_inv(double u) const {
    double lu = std::log(u);
    // lh_ is strictly decreasing in the index
    require_numeric(lu <= lh_.front() + 1e-9 && lu >= lh_.back() - 1e-9,
                    "h_inverse level outside tabulated range");
    std::size_t lo = 0, hi = lh_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (lh_[mid] >= lu ? lo : hi) = mid;
    }
    // local secant refinement on the cubic interpolant
    double a = lr_[lo], b = lr_[hi];
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (a + b);
      (interp(lh_, mid) >= lu ? a : b) = mid;
    }
    return std::exp(0.5 * (a + b));
  }

  double rho(double t, double r_abs) const {
    double cap = std::pow(h_inv(1.0 / t), -double(p_.d));
    if (r_abs <= 0) return cap;
    return std::min(cap, t * K(r_abs) * std::pow(r_abs, -double(p_.d)));
  }

  double err(double gamma, double beta, double t, double r_abs) const {
    double w = beta == 0.0 ? 1.0 : std::min(std::pow(r_abs, beta), 1.0);
    return std::pow(h_inv(1.0 / t), gamma) * w * rho(t, r_abs) / t;
  }

 private:
  double nu_tail_anchor(double R) const {
    if (R >= p_.support_radius) return 0;
    if (p_.tail_mass_override) return p_.tail_mass_override(R);
    double s_d = sphere_surface(p_.d);
    auto f = [&](double rho) { return rho >= p_.support_radius ? 0.0 : std::pow(rho, p_.d - 1) * p_.nu(rho); };
    if (std::isfinite(p_.support_radius))
      return s_d * integrate_refine(f, R, p_.support_radius, 1e-12);
    return s_d * integrate_tail(f, R, 1e-12);
  }

  double interp(const std::vector<double>& vals, double lx) const {
    // clamped cubic on the uniform log grid
    double lo = lr_.front(), step = lr_[1] - lr_[0];
    double pos = (lx - lo) / step;
    std::ptrdiff_t i = std::ptrdiff_t(std::floor(pos)) - 1;
    if (kink_below_ >= 0) i = lx < kink_lx_ ? std::min(i, kink_below_ - 3) : std::max(i, kink_below_ + 1);
    i = std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(lr_.size()) - 4);
    std::array<double, 4> xs{lr_[i], lr_[i + 1], lr_[i + 2], lr_[i + 3]};
    auto w = lagrange4(xs, lx);
    return w[0] * vals[i] + w[1] * vals[i + 1] + w[2] * vals[i + 2] + w[3] * vals[i + 3];
  }

  LevyProfile p_;
  std::vector<double> lr_, lK_, lh_;
  double kink_lx_ = 0;
  std::ptrdiff_t kink_below_ = -1;
};

// Weak scaling certificate for h over a radius window: exponents from
// two-point ratios, constants as the worst-case ratio against the fitted
// exponent, residual as the exponent spread against a pure power fit.
struct ScalingCertificate {
  double alpha_h = 0, beta_h = 0, C_h = 1, c_h = 1;
  double theta_h = 0;          // upper end of the certified window
  double r_lo = 0, r_hi = 0;   // the window itself
  double residual = 0;         // max |pairwise exponent - median exponent|
};

inline ScalingCertificate estimate_scaling(const LevyProfile& p, double r_lo, double r_hi,
                                           int n_r = 17, int n_lambda = 7) {
  require_config(r_lo > 0 && r_hi > r_lo, "scaling window must satisfy 0 < r_lo < r_hi");
  std::vector<double> rs(n_r), hs(n_r);
  for (int i = 0; i < n_r; ++i) {
    rs[i] = r_lo * std::pow(r_hi / r_lo, double(i) / (n_r - 1));
    hs[i] = h_of(p, rs[i]);
  }
  ScalingCertificate c;
  c.r_lo = r_lo;
  c.r_hi = r_hi;
  c.theta_h = r_hi;
  std::vector<double> expo;
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < i; ++j) {
      // lambda = rs[j]/rs[i] < 1; h(r) vs h(lambda r)
      double e = std::log(hs[j] / hs[i]) / std::log(rs[i] / rs[j]);
      expo.push_back(e);
    }
  (void)n_lambda;
  std::vector<double> sorted = expo;
  std::sort(sorted.begin(), sorted.end());
  double med = sorted[sorted.size() / 2];
  c.alpha_h = sorted.front();
  c.beta_h = sorted.back();
  double res = 0;
  for (double e : expo) res = std::max(res, std::abs(e - med));
  c.residual = res;
  // Constants: worst ratios h(r) / (lambda^{alpha} h(lambda r)) and the
  // mirrored lower-scaling version.
  double C = 1, cl = 1;
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < i; ++j) {
      double lambda = rs[j] / rs[i];
      C = std::max(C, hs[i] / (std::pow(lambda, c.alpha_h) * hs[j]));
      cl = std::min(cl, hs[i] / (std::pow(lambda, c.beta_h) * hs[j]));
    }
  c.C_h = C;
  c.c_h = cl;
  return c;
}

}  // namespace levyheat
