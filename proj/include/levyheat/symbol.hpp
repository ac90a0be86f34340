#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "levyheat/measure.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"

namespace levyheat {

// How small jumps are balanced in the operator: full drift compensation
// (admissible when first-moment tails converge and the local order exceeds
// one), no compensation (local order below one), or the symmetric second
// difference (symmetric jump density only).
enum class Compensation { symmetric, none, full };

inline const char* compensation_name(Compensation c) {
  switch (c) {
    case Compensation::symmetric: return "symmetric";
    case Compensation::none: return "none";
    default: return "full";
  }
}

namespace detail {

// 1 - J0(x) summed from the m >= 1 series terms: cancellation-free, and
// accurate to machine precision for |x| <= 3 (callers stay below the first
// zero of J0). The library Bessel routine is avoided on purpose: its
// evaluation noise near the zeros is far above the quadrature tolerances
// used here.
inline double one_minus_j0(double x) {
  double q = 0.25 * x * x;
  double term = q, sum = q;
  for (int m = 2; m <= 24; ++m) {
    term *= -q / double(m * m);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Scalar function of one positive variable tabulated on a uniform log grid.
// Interpolation is cubic on log|v| when the stencil has one sign (exact for
// pure powers), on raw values across sign changes. Below the grid the value
// follows the leading power; the high end is the caller's contract.
class LogTable {
 public:
  LogTable() = default;

  template <class F>
  static LogTable build(F&& f, double u_lo, double u_hi, int per_decade = 64) {
    LogTable t;
    int n = int(std::ceil(std::log10(u_hi / u_lo) * per_decade)) + 1;
    n = std::max(n, 8);
    t.lu0_ = std::log(u_lo);
    t.step_ = (std::log(u_hi) - t.lu0_) / (n - 1);
    t.v_.resize(n);
    t.lv_.resize(n);
    for (int i = 0; i < n; ++i) {
      double u = std::exp(t.lu0_ + i * t.step_);
      double v = f(u);
      require_numeric(std::isfinite(v), "symbol table value is not finite");
      t.v_[i] = v;
      t.lv_[i] = std::log(std::max(std::abs(v), 1e-300));
    }
    // leading power exponent from the two lowest nodes, for sub-grid queries
    t.low_slope_ = (t.lv_[1] - t.lv_[0]) / t.step_;
    if (!std::isfinite(t.low_slope_) || t.low_slope_ < 0 || t.low_slope_ > 4) t.low_slope_ = 2;
    return t;
  }

  bool empty() const { return v_.empty(); }

  double operator()(double u) const {
    if (u <= 0) return 0;
    double lu = std::log(u);
    if (lu < lu0_) return v_[0] * std::exp(low_slope_ * (lu - lu0_));
    double top = lu0_ + step_ * (double(v_.size()) - 1);
    require_numeric(lu <= top + 1e-12, "symbol queried beyond its tabulated range");
    double pos = (lu - lu0_) / step_;
    std::ptrdiff_t i = std::ptrdiff_t(std::floor(pos)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(v_.size()) - 4);
    std::array<double, 4> xs{lu0_ + i * step_, lu0_ + (i + 1) * step_, lu0_ + (i + 2) * step_,
                             lu0_ + (i + 3) * step_};
    auto w = lagrange4(xs, lu);
    bool pos_sign = v_[i] > 0 && v_[i + 1] > 0 && v_[i + 2] > 0 && v_[i + 3] > 0;
    bool neg_sign = v_[i] < 0 && v_[i + 1] < 0 && v_[i + 2] < 0 && v_[i + 3] < 0;
    if (pos_sign || neg_sign) {
      double lv = w[0] * lv_[i] + w[1] * lv_[i + 1] + w[2] * lv_[i + 2] + w[3] * lv_[i + 3];
      return (pos_sign ? 1 : -1) * std::exp(lv);
    }
    return w[0] * v_[i] + w[1] * v_[i + 1] + w[2] * v_[i + 2] + w[3] * v_[i + 3];
  }

 private:
  double lu0_ = 0, step_ = 1, low_slope_ = 2;
  std::vector<double> v_, lv_;
};

}  // namespace detail

// Radial symbol tables for one jump profile under one compensation rule,
// decomposed over cosine z-factors cos(k_m |z|) (k=0 means no modulation).
//
// d=1 modulated rows reduce exactly to the unmodulated tables through
//   (1-cos(s r))cos(k r) = (1-cos((s+k)r))/2 + (1-cos(|s-k|r))/2 - (1-cos(k r))
// and its sine analogue, so only the smooth power-like bare transforms are
// ever tabulated and the cusp at s = k is carried analytically. d=2 keeps one
// table per modulated row (isotropic case only).
class SymbolTable {
 public:
  SymbolTable(const LevyProfile& p, std::vector<double> ks, Compensation comp, double s_max,
              double tol = 1e-12)
      : p_(p), ks_(std::move(ks)), comp_(comp), tol_(tol) {
    require_config(!ks_.empty(), "at least one z-factor row is required");
    for (double k : ks_) require_config(k >= 0, "cosine z-factor frequencies must be >= 0");
    skew_ = p_.d == 1 && !p_.isotropic();
    require_config(!(comp_ == Compensation::symmetric && skew_),
                   "the symmetric difference needs a symmetric jump density");
    require_config(p_.d == 1 || p_.isotropic(), "d=2 supports isotropic densities only");
    if (comp_ == Compensation::none)
      require_config(p_.sing_hint < 1, "uncompensated small jumps need local order below one");
    if (comp_ == Compensation::full)
      require_config(p_.tail == TailClass::exponential || p_.tail == TailClass::truncated ||
                         p_.tail_exponent > 1,
                     "full drift compensation needs integrable first-moment tails");
    double k_max = *std::max_element(ks_.begin(), ks_.end());
    double u_hi = (s_max + k_max) * 1.05 + 1.0;
    // d=1 rows are built from shifted bare tables, so |s-k| can land
    // arbitrarily low; d=2 rows are only ever read at lattice frequencies,
    // which stay well above the floor, and power extrapolation covers the
    // rest.
    double u_lo = p_.d == 1 ? 1e-8 : 1e-3;
    constexpr int density = 128;  // nodes per decade; quartic interp error
    if (p_.d == 1) {
      sym_ = detail::LogTable::build([this](double u) { return sym_value(u); }, u_lo, u_hi, density);
      if (skew_) {
        odd_ = detail::LogTable::build([this](double u) { return odd_value(u); }, u_lo, u_hi, density);
        comp_const_.assign(ks_.size(), 0.0);
        if (comp_ == Compensation::full)
          for (std::size_t m = 0; m < ks_.size(); ++m)
            if (ks_[m] > 0) comp_const_[m] = comp_constant(ks_[m]);
      }
    } else {
      rows_.resize(ks_.size());
      for (std::size_t m = 0; m < ks_.size(); ++m) {
        double k = ks_[m];
        if (k == 0 && bare_row_ >= 0) {
          rows_[m] = rows_[std::size_t(bare_row_)];
          continue;
        }
        rows_[m] = detail::LogTable::build([this, k](double u) { return sym2_value(u, k); }, u_lo,
                                           u_hi, density);
        if (k == 0) bare_row_ = int(m);
      }
      if (bare_row_ < 0)
        bare_ = detail::LogTable::build([this](double u) { return sym2_value(u, 0.0); }, u_lo,
                                        u_hi, density);
    }
  }

  int rank() const { return int(ks_.size()); }
  Compensation comp() const { return comp_; }
  bool skewed() const { return skew_; }
  const LevyProfile& profile() const { return p_; }

  // Symmetric part of row m at radial frequency s >= 0.
  double re_row(int m, double s) const {
    if (s <= 0) return 0;
    double k = ks_[std::size_t(m)];
    if (p_.d == 2) return rows_[std::size_t(m)](s);
    if (k == 0) return sym_(s);
    return 0.5 * sym_(s + k) + 0.5 * sym_(std::abs(s - k)) - sym_(k);
  }

  // Skew part of row m at radial frequency s >= 0 (0 unless d=1 with a
  // tilted density under first-difference compensation rules).
  double im_row(int m, double s) const {
    if (!skew_ || s <= 0) return 0;
    double k = ks_[std::size_t(m)];
    double base;
    if (k == 0) {
      base = odd_(s);
    } else {
      double lo = std::abs(s - k) < 1e-300 ? 0.0 : (s > k ? odd_(s - k) : -odd_(k - s));
      base = 0.5 * odd_(s + k) + 0.5 * lo;
      if (comp_ == Compensation::full) base += s * comp_const_[std::size_t(m)];
    }
    return base;
  }

  // Full row symbol at a signed d=1 frequency (d=2 callers pass |xi| and get
  // the real radial value).
  std::complex<double> row(int m, double xi) const {
    double s = std::abs(xi);
    double im = im_row(m, s);
    return {re_row(m, s), xi >= 0 ? -im : im};
  }

  // Unit-coefficient symmetric symbol (the kappa-free envelope base).
  double bare(double s) const {
    if (s <= 0) return 0;
    if (p_.d == 1) return sym_(s);
    if (bare_row_ >= 0) return rows_[std::size_t(bare_row_)](s);
    return bare_(s);
  }

 private:
  // weights on the positive half-line: even and odd parts of the density
  double g_even(double r) const {
    return p_.j_density({r, 0.0}) + p_.j_density({-r, 0.0});
  }
  double g_odd(double r) const {
    return p_.j_density({r, 0.0}) - p_.j_density({-r, 0.0});
  }

  // cancellation-free 1 - cos(x)
  static double vcos(double x) { return 2.0 * sqr(std::sin(0.5 * x)); }

  // d=1: ∫_0^∞ (1-cos(u r)) g_even(r) dr
  double sym_value(double u) const {
    double r_turn = pi / u;
    double rc = p_.support_radius;
    double head_end = std::min(r_turn, rc);
    double v = integrate_power_singular([&](double r) { return vcos(u * r) * g_even(r); }, 0.0,
                                        head_end, 1.0 - p_.sing_hint, tol_);
    if (rc <= r_turn) return v;
    if (std::isfinite(rc)) {
      v += osc_range([&](double r) { return g_even(r); }, [&](double r) { return vcos(u * r); },
                     pi / u, r_turn, rc, tol_);
      return v;
    }
    v += integrate_tail([&](double r) { return g_even(r); }, r_turn, tol_);
    v -= osc_tail([&](double r) { return g_even(r); }, [&](double r) { return std::cos(u * r); },
                  r_turn, r_turn, tol_);
    return v;
  }

  // d=1: ∫_0^∞ sin'(u r) g_odd(r) dr, where sin' is sin for uncompensated
  // jumps and sin(u r) - u r under full compensation.
  double odd_value(double u) const {
    bool full = comp_ == Compensation::full;
    auto head_f = [&](double r) {
      double w = full ? std::sin(u * r) - u * r : std::sin(u * r);
      return w * g_odd(r);
    };
    double r_turn = pi / u;
    double rc = p_.support_radius;
    double head_end = std::min(r_turn, rc);
    double sing = full ? 2.0 - p_.sing_hint : -p_.sing_hint;
    double v = integrate_power_singular(head_f, 0.0, head_end, sing, tol_);
    if (rc <= r_turn) return v;
    if (std::isfinite(rc)) {
      v += osc_range(head_f, [](double) { return 1.0; }, pi / u, r_turn, rc, tol_);
      return v;
    }
    v += osc_tail([&](double r) { return g_odd(r); }, [&](double r) { return std::sin(u * r); },
                  r_turn, r_turn, tol_);
    if (full) v -= u * integrate_tail([&](double r) { return r * g_odd(r); }, r_turn, tol_);
    return v;
  }

  // d=1, full compensation, modulated rows: ∫_0^∞ r (1-cos(k r)) g_odd(r) dr
  double comp_constant(double k) const {
    double r_turn = pi / k;
    double rc = p_.support_radius;
    double head_end = std::min(r_turn, rc);
    double v =
        integrate_power_singular([&](double r) { return r * vcos(k * r) * g_odd(r); }, 0.0,
                                 head_end, 2.0 - p_.sing_hint, tol_);
    if (rc <= r_turn) return v;
    if (std::isfinite(rc)) {
      v += osc_range([&](double r) { return r * g_odd(r); },
                     [&](double r) { return vcos(k * r); }, pi / k, r_turn, rc, tol_);
      return v;
    }
    v += integrate_tail([&](double r) { return r * g_odd(r); }, r_turn, tol_);
    v -= osc_tail([&](double r) { return r * g_odd(r); }, [&](double r) { return std::cos(k * r); },
                  r_turn, r_turn, tol_);
    return v;
  }

  // d=2 isotropic: 2π ∫_0^∞ (1-J0(u r)) cos(k r) nu(r) r dr. J0 is never
  // evaluated directly: below its first zero 1-J0 is a short power series,
  // and beyond it J0(u r) = (2/π)∫_0^{π/2} cos(u r sin φ) dφ turns the tail
  // into plain cosine tails at frequencies u·sinφ ± k. Their values move by
  // at most the fixed phase u·r_turn across the φ-average, so a few GL
  // panels in φ resolve it for every u.
  double sym2_value(double u, double k) const {
    double s_d = 2.0 * pi;
    auto w = [&](double r) { return s_d * p_.nu(r) * r; };
    double r_turn = 2.404825557695773 / u;  // first zero of J0
    double rc = p_.support_radius;
    double head_cap = std::min(r_turn, rc);
    double r_star = k > 0 ? std::min(pi / k, head_cap) : head_cap;
    double v = integrate_power_singular(
        [&](double r) { return detail::one_minus_j0(u * r) * std::cos(k * r) * w(r); }, 0.0,
        r_star, 1.0 - p_.sing_hint, tol_);
    if (r_star < head_cap)
      v += osc_range([&](double r) { return detail::one_minus_j0(u * r) * w(r); },
                     [&](double r) { return std::cos(k * r); }, pi / k, r_star, head_cap, tol_);
    if (rc <= r_turn) return v;
    if (std::isfinite(rc)) {
      if (k == 0)
        v += integrate_geometric(w, r_turn, rc, tol_);
      else
        v += osc_range(w, [&](double r) { return std::cos(k * r); }, pi / k, r_turn, rc, tol_);
      v -= j0_cos_range(w, u, k, r_turn, rc);
      return v;
    }
    v += cos_tail(w, k, r_turn, tol_);  // k = 0 degenerates to the plain tail
    v -= j0_cos_tail(w, u, k, r_turn);
    return v;
  }

  // ∫_a^∞ J0(u r) cos(k r) w(r) dr through the angular representation of J0:
  // (2/π) ∫_0^{π/2} dφ of cosine tails at frequencies u·sinφ ± k. A cosine
  // tail is A + B·c^α + (smooth) near frequency c = 0, so the φ-integrand
  // carries an algebraic singularity wherever u·sinφ hits k (or 0): the
  // tanh-sinh rule absorbs it at piece endpoints.
  template <class W>
  double j0_cos_tail(W&& w, double u, double k, double a) const {
    auto g = [&](double phi) {
      double c = u * std::sin(phi);
      if (k == 0) return cos_tail(w, c, a, tol_);
      return 0.5 * cos_tail(w, c + k, a, tol_) + 0.5 * cos_tail(w, std::abs(c - k), a, tol_);
    };
    double split = k > 0 && k < u ? std::asin(k / u) : 0.0;
    double total = tanh_sinh(g, 0.0, split > 0 ? split : 0.5 * pi, tol_);
    if (split > 0) total += tanh_sinh(g, split, 0.5 * pi, tol_);
    return total * 2.0 / pi;
  }

  // Finite-range companion of j0_cos_tail for compactly supported densities.
  template <class W>
  double j0_cos_range(W&& w, double u, double k, double a, double b) const {
    auto one = [&](double c) {
      if (!(c > 0)) return integrate_geometric(w, a, b, tol_);
      return osc_range(w, [c](double r) { return std::cos(c * r); }, pi / c, a, b, tol_);
    };
    auto g = [&](double phi) {
      double c = u * std::sin(phi);
      if (k == 0) return one(c);
      return 0.5 * one(c + k) + 0.5 * one(std::abs(c - k));
    };
    double total = 0;
    for (int j = 0; j < 4; ++j) total += integrate_gl(g, j * pi / 8, (j + 1) * pi / 8, 8);
    return total * 2.0 / pi;
  }

  LevyProfile p_;
  std::vector<double> ks_;
  Compensation comp_;
  double tol_;
  bool skew_ = false;
  detail::LogTable sym_, odd_, bare_;
  std::vector<detail::LogTable> rows_;
  std::vector<double> comp_const_;
  int bare_row_ = -1;
};

}  // namespace levyheat
