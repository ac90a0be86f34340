#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "levyheat/coefficient.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/measure.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"
#include "levyheat/symbol.hpp"
#include "levyheat/util.hpp"

namespace levyheat {

// Real-space application of the jump generator on the periodic lattice:
// per-displacement-cell jump masses (with wrap-around images folded in) plus
// an analytic Taylor core below the core radius. Entirely independent of the
// Fourier symbol tables — this is the cross-check path and the right-hand
// side for method-of-lines evolution.
//
// Per modulation row m (weight b_m(z) = cos(zk_m |z|)),
//   (L_m f)(x) = sum_j (f(x+v_j) - f(x)) w_m[j]
//              + f' A1_m            (uncompensated only)
//              + f'' A2_m / 2 + f''' A3_m / 6 + f'''' A4_m / 24
//              - f' Z_m             (full compensation only)
// with A_q the core moments of z^q b_m J and Z_m the drift of the jumps
// beyond the core. The operator itself is sum_m a_m(x) (L_m f)(x); freezing
// the coefficients at another point is just a different contraction.
class RingOperator {
 public:
  RingOperator(const SpaceGrid& grid, const LevyProfile& prof, const CoefficientField& coef,
               Compensation comp)
      : grid_(grid), prof_(prof), coef_(coef), comp_(comp) {
    require_config(prof_.d == grid_.d, "profile dimension must match the grid");
    require_config(grid_.d == 1 || prof_.isotropic(), "d=2 supports isotropic densities only");
    zc_ = (core_cells_ - 0.5) * grid_.dx();
    rows_.resize(std::size_t(coef_.rank()));
    for (int m = 0; m < coef_.rank(); ++m) {
      RowData& rd = rows_[std::size_t(m)];
      double k = coef_.zk(m);
      if (grid_.d == 1)
        build_cells_1d(rd, k);
      else
        build_cells_2d(rd, k);
      build_core(rd, k);
      rd.wsum_abs = 0;
      for (double w : rd.w) rd.wsum_abs += std::abs(w);
    }
  }

  int rank() const { return coef_.rank(); }
  double core_radius() const { return zc_; }
  const SpaceGrid& grid() const { return grid_; }

  // Per-row values (L_m f)(x). eps > 0 drops jumps with |z| <= eps; it must
  // stay inside the analytic core so the cut never splits a lattice cell.
  void apply_rows(const std::vector<double>& f, int x0, int x1, double eps, double* out) const {
    require_config(eps >= 0 && (eps == 0 || eps < zc_),
                   "jump cutoff must stay inside the analytic core");
    int n = grid_.n;
    double dx = grid_.dx();
    double d1 = 0, d2 = 0, d3 = 0, d4 = 0, lap = 0;
    if (grid_.d == 1) {
      auto at = [&](int j) { return f[std::size_t(grid_.wrap_index(x0 + j))]; };
      double fm2 = at(-2), fm1 = at(-1), f0 = at(0), fp1 = at(1), fp2 = at(2);
      d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * dx);
      d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * dx * dx);
      d3 = (fp2 - fm2 - 2 * (fp1 - fm1)) / (2 * dx * dx * dx);
      d4 = (fp2 - 4 * fp1 + 6 * f0 - 4 * fm1 + fm2) / (dx * dx * dx * dx);
      double base = f0;
      for (int m = 0; m < coef_.rank(); ++m) {
        const RowData& rd = rows_[std::size_t(m)];
        double acc = 0;
        for (int j = 0; j < n; ++j) {
          double w = rd.w[std::size_t(j)];
          if (w == 0) continue;
          acc += (f[std::size_t(grid_.wrap_index(x0 + j - n / 2))] - base) * w;
        }
        double a1 = rd.a1, a2 = rd.a2, a3 = rd.a3, a4 = rd.a4;
        if (eps > 0) shave_core_1d(coef_.zk(m), eps, a1, a2, a3, a4);
        if (comp_ == Compensation::none) acc += d1 * a1;
        acc += d2 * a2 / 2 + d3 * a3 / 6 + d4 * a4 / 24;
        if (comp_ == Compensation::full) acc -= d1 * rd.z;
        out[m] = acc;
      }
    } else {
      auto at = [&](int j0, int j1) {
        return f[std::size_t(grid_.id(grid_.wrap_index(x0 + j0), grid_.wrap_index(x1 + j1)))];
      };
      double f0 = at(0, 0);
      double dxx = (-at(-2, 0) + 16 * at(-1, 0) - 30 * f0 + 16 * at(1, 0) - at(2, 0)) / (12 * dx * dx);
      double dyy = (-at(0, -2) + 16 * at(0, -1) - 30 * f0 + 16 * at(0, 1) - at(0, 2)) / (12 * dx * dx);
      lap = dxx + dyy;
      for (int m = 0; m < coef_.rank(); ++m) {
        const RowData& rd = rows_[std::size_t(m)];
        double acc = 0;
        for (int j0 = 0; j0 < n; ++j0) {
          const double* wrow = rd.w.data() + std::size_t(j0) * std::size_t(n);
          int i0 = grid_.wrap_index(x0 + j0 - n / 2);
          const double* frow = f.data() + std::size_t(i0) * std::size_t(n);
          for (int j1 = 0; j1 < n; ++j1) {
            double w = wrow[j1];
            if (w == 0) continue;
            acc += (frow[grid_.wrap_index(x1 + j1 - n / 2)] - f0) * w;
          }
        }
        double a2 = rd.a2;
        if (eps > 0)
          a2 -= pi * integrate_power_singular(
                         [&](double r) { return r * r * r * std::cos(coef_.zk(m) * r) * prof_.nu(r); },
                         0.0, eps, 1.0 - prof_.sing_hint, ctol_);
        acc += lap * a2 / 2;
        out[m] = acc;
      }
    }
  }

  // Coefficient-weighted operator at one lattice point.
  double apply(const std::vector<double>& f, int x0, int x1 = 0, double eps = 0) const {
    std::array<double, 8> row{};
    require_config(coef_.rank() <= int(row.size()), "coefficient rank too large");
    apply_rows(f, x0, x1, eps, row.data());
    double v = 0;
    double xc = grid_.coord(x0);
    for (int m = 0; m < coef_.rank(); ++m) v += coef_.a(m, xc) * row[std::size_t(m)];
    return v;
  }

  // Whole-field application with eps = 0 (method-of-lines right-hand side).
  void apply_field(const std::vector<double>& f, std::vector<double>& out) const {
    out.resize(f.size());
    parallel_chunks(grid_.size(), [&](std::size_t b, std::size_t e, std::size_t) {
      std::array<double, 8> row{};
      for (std::size_t i = b; i < e; ++i) {
        int x0 = grid_.d == 1 ? int(i) : int(i) / grid_.n;
        int x1 = grid_.d == 1 ? 0 : int(i) % grid_.n;
        apply_rows(f, x0, x1, 0.0, row.data());
        double xc = grid_.coord(x0);
        double v = 0;
        for (int m = 0; m < coef_.rank(); ++m) v += coef_.a(m, xc) * row[std::size_t(m)];
        out[i] = v;
      }
    });
  }

  // Conservative bound on the lattice operator norm, for step-size control.
  double norm_bound() const {
    double dx = grid_.dx();
    double bound = 0;
    for (int m = 0; m < coef_.rank(); ++m) {
      const RowData& rd = rows_[std::size_t(m)];
      double amax = std::max(std::abs(coef_.a_lo(m)), std::abs(coef_.a_hi(m)));
      double core = std::abs(rd.a1) * 1.5 / dx + rd.a2 * (16.0 / 3.0) / (2 * dx * dx) +
                    std::abs(rd.a3) * 3.0 / (6 * dx * dx * dx) + rd.a4 * 16.0 / (24 * sqr(sqr(dx))) +
                    std::abs(rd.z) * 1.5 / dx;
      bound += amax * (2 * rd.wsum_abs + core);
    }
    return bound;
  }

 private:
  struct RowData {
    std::vector<double> w;             // folded jump masses per displacement slot
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0;  // core moments over [0, zc]
    double z = 0;                      // drift of jumps beyond the core (full comp)
    double wsum_abs = 0;
  };

  double g_even(double r) const { return prof_.j_density({r, 0.0}) + prof_.j_density({-r, 0.0}); }
  double g_odd(double r) const { return prof_.j_density({r, 0.0}) - prof_.j_density({-r, 0.0}); }

  void build_cells_1d(RowData& rd, double k) {
    int n = grid_.n;
    double dx = grid_.dx(), L = grid_.L;
    rd.w.assign(std::size_t(n), 0.0);
    auto bj = [&](double z) { return std::cos(k * std::abs(z)) * prof_.j_density({z, 0.0}); };
    // base period: per-cell quadrature (the integrand is steep near the core)
    for (int j = 0; j < n; ++j) {
      double v = -L + j * dx;
      if (std::abs(v) < zc_) continue;
      rd.w[std::size_t(j)] = integrate_refine(bj, v - dx / 2, v + dx / 2, ctol_);
    }
    // wrap-around images: midpoint masses, far enough out to be smooth
    double reach = L;
    for (int mi = 1; mi <= images_1d_; ++mi) {
      double off = 2.0 * L * mi;
      reach = off + L;
      for (int j = 0; j < n; ++j) {
        double v = -L + j * dx;
        rd.w[std::size_t(j)] += (bj(v + off) + bj(v - off)) * dx;
      }
      if (nu_tail(prof_, reach) < 1e-16) break;
    }
    // what is left beyond the last image lands (nearly) uniformly on the torus
    double rem = tail_mass(k, reach);
    for (double& w : rd.w) w += rem / n;
  }

  void build_cells_2d(RowData& rd, double k) {
    int n = grid_.n;
    double dx = grid_.dx(), L = grid_.L;
    rd.w.assign(std::size_t(n) * std::size_t(n), 0.0);
    auto bnu = [&](double r) { return r >= prof_.support_radius ? 0.0 : std::cos(k * r) * prof_.nu(r); };
    double reach = (2 * images_2d_ + 1) * L;
    for (int mi0 = -images_2d_; mi0 <= images_2d_; ++mi0)
      for (int mi1 = -images_2d_; mi1 <= images_2d_; ++mi1) {
        bool base = mi0 == 0 && mi1 == 0;
        for (int j0 = 0; j0 < n; ++j0)
          for (int j1 = 0; j1 < n; ++j1) {
            double z0 = -L + j0 * dx + 2 * L * mi0;
            double z1 = -L + j1 * dx + 2 * L * mi1;
            // the core is the square block of cells around the origin
            if (base && std::abs(z0) < zc_ && std::abs(z1) < zc_) continue;
            double r = std::hypot(z0, z1);
            if (r > reach) continue;  // circle cut; the remainder integral picks it up
            int s = 1;
            if (base) s = r < 5 * dx ? 8 : (r < 8 * dx ? 4 : 1);
            double mass = 0, cell = dx / s;
            for (int a = 0; a < s; ++a)
              for (int b = 0; b < s; ++b) {
                double u0 = z0 + (a + 0.5) * cell - dx / 2;
                double u1 = z1 + (b + 0.5) * cell - dx / 2;
                mass += bnu(std::hypot(u0, u1)) * cell * cell;
              }
            rd.w[std::size_t(grid_.id(j0, j1))] += mass;
          }
      }
    double rem = tail_mass(k, reach);
    for (double& w : rd.w) w += rem / (double(n) * n);
  }

  // mass of the jumps beyond radius R, with the row modulation in place
  double tail_mass(double k, double R) const {
    if (R >= prof_.support_radius) return 0;
    if (k == 0) return nu_tail(prof_, R);
    if (grid_.d == 1) {
      if (std::isfinite(prof_.support_radius))
        return integrate_refine([&](double r) { return std::cos(k * r) * g_even(r); }, R,
                                prof_.support_radius, ctol_);
      return cos_tail([&](double r) { return g_even(r); }, k, R, ctol_);
    }
    auto w = [&](double r) { return 2 * pi * r * prof_.nu(r); };
    if (std::isfinite(prof_.support_radius))
      return osc_range(w, [&](double r) { return std::cos(k * r); }, pi / k, R,
                       prof_.support_radius, ctol_);
    return cos_tail(w, k, R, ctol_);
  }

  void build_core(RowData& rd, double k) {
    auto b = [k](double r) { return std::cos(k * r); };
    double s = prof_.sing_hint;
    if (grid_.d == 1) {
      if (comp_ == Compensation::none)
        rd.a1 = integrate_power_singular([&](double r) { return r * b(r) * g_odd(r); }, 0.0, zc_,
                                         0.0 - s, ctol_);
      rd.a2 = integrate_power_singular([&](double r) { return r * r * b(r) * g_even(r); }, 0.0, zc_,
                                       1.0 - s, ctol_);
      rd.a3 = integrate_power_singular([&](double r) { return r * r * r * b(r) * g_odd(r); }, 0.0,
                                       zc_, 2.0 - s, ctol_);
      rd.a4 = integrate_power_singular([&](double r) { return sqr(sqr(r)) * b(r) * g_even(r); }, 0.0,
                                       zc_, 3.0 - s, ctol_);
      if (comp_ == Compensation::full) rd.z = drift_beyond_core(k);
    } else {
      // square core [-zc,zc]^2: cells tile it exactly, so no cell straddles
      // the cut. The 2-D moment integral is nested 1-D quadrature; the outer
      // integrand behaves like z0^{1-sing} at the axis. The inner integrand
      // peaks like z1^{-2-sing} within |z1| < z0, so it is split there:
      // a rescaled head plus geometric panels out to the corner.
      auto inner = [&](double z0) {
        if (z0 <= 0) return 0.0;
        auto f = [&](double z1) {
          double r = std::hypot(z0, z1);
          return b(r) * prof_.nu(r);
        };
        double split = std::min(z0, zc_);
        double v = split * integrate_refine([&](double t) { return f(split * t); }, 0.0, 1.0, ctol_);
        if (split < zc_) v += integrate_geometric(f, split, zc_, ctol_);
        return v;
      };
      rd.a2 = 4 * integrate_power_singular([&](double z0) { return z0 * z0 * inner(z0); }, 0.0, zc_,
                                           1.0 - s, ctol_);
    }
  }

  // full compensation: ∫_{|z|>zc} z b(z) J(z) dz, the drift the ring cells
  // must give back
  double drift_beyond_core(double k) const {
    auto w = [&](double r) { return r * g_odd(r); };
    double rc = prof_.support_radius;
    if (std::isfinite(rc)) {
      if (zc_ >= rc) return 0;
      return k > 0 ? osc_range(w, [&](double r) { return std::cos(k * r); }, pi / k, zc_, rc, ctol_)
                   : integrate_refine(w, zc_, rc, ctol_);
    }
    if (k > 0) return cos_tail(w, k, zc_, ctol_);
    return integrate_tail(w, zc_, ctol_);
  }

  // removes the moments of the shell [0, eps] when jumps below eps are cut
  void shave_core_1d(double k, double eps, double& a1, double& a2, double& a3, double& a4) const {
    auto b = [k](double r) { return std::cos(k * r); };
    double s = prof_.sing_hint;
    if (comp_ == Compensation::none)
      a1 -= integrate_power_singular([&](double r) { return r * b(r) * g_odd(r); }, 0.0, eps,
                                     0.0 - s, ctol_);
    a2 -= integrate_power_singular([&](double r) { return r * r * b(r) * g_even(r); }, 0.0, eps,
                                   1.0 - s, ctol_);
    a3 -= integrate_power_singular([&](double r) { return r * r * r * b(r) * g_odd(r); }, 0.0, eps,
                                   2.0 - s, ctol_);
    a4 -= integrate_power_singular([&](double r) { return sqr(sqr(r)) * b(r) * g_even(r); }, 0.0,
                                   eps, 3.0 - s, ctol_);
  }

  static constexpr int core_cells_ = 3;   // cells |j| < 3 form the analytic core
  static constexpr int images_1d_ = 256;  // wrap-around images folded explicitly
  static constexpr int images_2d_ = 24;
  static constexpr double ctol_ = 1e-12;

  SpaceGrid grid_;
  LevyProfile prof_;
  CoefficientField coef_;
  Compensation comp_;
  double zc_ = 0;
  std::vector<RowData> rows_;
};

// Classic RK4 on du/dt = L u. With steps <= 0 the count comes from the
// operator norm bound (explicit stability with margin).
inline std::vector<double> mol_evolve(const RingOperator& op, std::vector<double> u, double t_span,
                                      int steps = 0) {
  require_config(t_span >= 0, "evolution span must be non-negative");
  if (t_span == 0) return u;
  if (steps <= 0) steps = int(std::ceil(t_span * op.norm_bound() / 2.0)) + 1;
  double dt = t_span / steps;
  std::size_t sz = u.size();
  std::vector<double> k1, k2, k3, k4, tmp(sz);
  for (int s = 0; s < steps; ++s) {
    op.apply_field(u, k1);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    op.apply_field(tmp, k2);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    op.apply_field(tmp, k3);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + dt * k3[i];
    op.apply_field(tmp, k4);
    for (std::size_t i = 0; i < sz; ++i) u[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return u;
}

}  // namespace levyheat
