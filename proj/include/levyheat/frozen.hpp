#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "levyheat/coefficient.hpp"
#include "levyheat/fft.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/symbol.hpp"

namespace levyheat {

// Kernels of the constant-coefficient operators obtained by freezing the
// coefficient field at a base point y. Everything is computed on the lattice
// by spectral inversion of exp(-t ψ_θ(ξ)), ψ_θ = Σ_m θ_m·row_m, θ = a(y0):
// one inverse FFT per base point on a per-time oversampled frequency lattice
// (the coarse Nyquist rarely damps enough on its own; reading every ovs-th
// fine point keeps storage on the configured lattice while the certified
// aliasing factor is the one at the inverted Nyquist).
//
// Stored fields are displacement-indexed: index j ↔ v_j = -L + jΔx per axis.

struct FrozenSlices {
  SpaceGrid grid;
  double t = 0;
  int ovs = 1;
  double alias = 0;       // e^{-t κ0 ψ_bare} at the inverted axis Nyquist
  double imag_noise = 0;  // max |Im| over all inversions (should be ~1e-13)
  int rank = 0;

  std::vector<double> theta;             // [m][y0] coefficient values at bases
  std::vector<double> p;                 // [y0][v]   frozen kernel
  std::vector<std::vector<double>> lm;   // [m][y0][v] m-th row operator applied
  std::vector<std::vector<double>> grad; // [e][y0][v] ∂/∂x_e, when requested

  std::size_t vol() const { return grid.size(); }
  std::size_t disp(int dv0, int dv1 = 0) const {
    int half = grid.n / 2, mask = grid.n - 1;
    int j0 = (dv0 + half) & mask;
    if (grid.d == 1) return std::size_t(j0);
    int j1 = (dv1 + half) & mask;
    return grid.id(j0, j1);
  }
  // p^{(y0)}(t, ·) at lattice displacement dv = x_index - y_index per axis
  double p_at(int y0, int dv0, int dv1 = 0) const { return p[y0 * vol() + disp(dv0, dv1)]; }
  double lm_at(int m, int y0, int dv0, int dv1 = 0) const {
    return lm[std::size_t(m)][y0 * vol() + disp(dv0, dv1)];
  }
  double grad_at(int e, int y0, int dv0, int dv1 = 0) const {
    return grad[std::size_t(e)][y0 * vol() + disp(dv0, dv1)];
  }
  double theta_at(int m, int y0) const { return theta[std::size_t(m) * grid.n + y0]; }
  // ∂_t p^{(y0)} = Σ_m θ_m(y0) (L_m p^{(y0)})
  double dpdt_at(int y0, int dv0, int dv1 = 0) const {
    double s = 0;
    for (int m = 0; m < rank; ++m) s += theta_at(m, y0) * lm_at(m, y0, dv0, dv1);
    return s;
  }
};

class FrozenFactory {
 public:
  FrozenFactory(const SpaceGrid& grid, const LevyProfile& profile, Compensation comp,
                const CoefficientField& coef, double tol_alias = 1e-8, int ovs_cap = 0)
      : grid_(grid),
        coef_(coef),
        tol_alias_(tol_alias),
        ovs_cap_(ovs_cap > 0 ? ovs_cap : (grid.d == 1 ? 64 : 8)),
        sym_(profile, coef.frequencies(), comp, grid.xi_max() * ovs_cap_) {
    require_config(profile.d == grid.d, "profile and lattice dimension differ");
    require_config((ovs_cap_ & (ovs_cap_ - 1)) == 0, "oversampling cap must be a power of two");
  }

  const SymbolTable& symbol() const { return sym_; }
  const CoefficientField& coefficients() const { return coef_; }
  const SpaceGrid& grid() const { return grid_; }

  // e^{-t κ0 ψ_bare} at the axis Nyquist of the ovs-fold inverted lattice:
  // an upper bound on every frozen spectrum's magnitude there, since
  // Re ψ_θ(ξ) ≥ κ0·ψ_bare(|ξ|) pointwise.
  double alias_factor(double t, int ovs) const {
    return std::exp(-t * coef_.kappa0 * sym_.bare(grid_.nyquist() * ovs));
  }

  int oversample_for(double t) const {
    for (int ovs = 1; ovs <= ovs_cap_; ovs *= 2)
      if (alias_factor(t, ovs) <= tol_alias_) return ovs;
    fail_numeric("time node below the aliasing floor of this lattice (raise n, L, or the time floor)");
  }

  // smallest admissible time at the oversampling cap
  double time_floor() const {
    double target = -std::log(tol_alias_);
    return target / (coef_.kappa0 * sym_.bare(grid_.nyquist() * ovs_cap_));
  }

  FrozenSlices slices(double t, bool with_rows = true, bool with_grad = false) const {
    require_numeric(t > 0, "frozen slices need t > 0");
    FrozenSlices out{grid_};
    out.t = t;
    out.ovs = oversample_for(t);
    out.alias = alias_factor(t, out.ovs);
    out.rank = coef_.rank();
    const RowTables& rt = row_tables(out.ovs);
    SpaceGrid fine(grid_.d, grid_.n * out.ovs, grid_.L);

    int n = grid_.n, rank = out.rank;
    out.theta.resize(std::size_t(rank) * n);
    for (int m = 0; m < rank; ++m)
      for (int y0 = 0; y0 < n; ++y0) out.theta[std::size_t(m) * n + y0] = coef_.a(m, grid_.coord(y0));

    std::size_t vol = grid_.size(), fvol = fine.size();
    out.p.assign(std::size_t(n) * vol, 0.0);
    if (with_rows) out.lm.assign(rank, std::vector<double>(std::size_t(n) * vol, 0.0));
    if (with_grad) out.grad.assign(grid_.d, std::vector<double>(std::size_t(n) * vol, 0.0));

    std::vector<double> imag_by_chunk(chunk_grid, 0.0);
    parallel_chunks(std::size_t(n), [&](std::size_t b, std::size_t e, std::size_t chunk) {
      std::vector<std::complex<double>> base(fvol), work(fvol);
      std::vector<double> fine_field(fvol);
      double imag = 0;
      for (std::size_t y0 = b; y0 < e; ++y0) {
        // spectrum of the kernel frozen at this base point
        for (std::size_t kidx = 0; kidx < fvol; ++kidx) {
          std::complex<double> psi = 0;
          for (int m = 0; m < rank; ++m)
            psi += out.theta[std::size_t(m) * n + y0] * rt.rows[std::size_t(m)][kidx];
          base[kidx] = std::exp(-t * psi);
        }
        auto invert_into = [&](std::vector<double>& dst) {
          imag = std::max(imag, field_of(fine, work, fine_field.data()));
          subsample(fine_field, out.ovs, &dst[y0 * vol]);
        };
        work = base;
        invert_into(out.p);
        if (with_rows)
          for (int m = 0; m < rank; ++m) {
            const auto& row = rt.rows[std::size_t(m)];
            for (std::size_t kidx = 0; kidx < fvol; ++kidx) work[kidx] = -row[kidx] * base[kidx];
            invert_into(out.lm[std::size_t(m)]);
          }
        if (with_grad)
          for (int e_ax = 0; e_ax < grid_.d; ++e_ax) {
            for (std::size_t kidx = 0; kidx < fvol; ++kidx)
              work[kidx] = std::complex<double>(0, rt.xi[std::size_t(e_ax)][kidx]) * base[kidx];
            invert_into(out.grad[std::size_t(e_ax)]);
          }
      }
      imag_by_chunk[chunk] = imag;
    });
    for (double v : imag_by_chunk) out.imag_noise = std::max(out.imag_noise, v);
    return out;
  }

 private:
  struct RowTables {
    // row_m(ξ) over the fine FFT-ordered lattice; xi[e] the frequency values
    std::vector<std::vector<std::complex<double>>> rows;
    std::vector<std::vector<double>> xi;
  };

  const RowTables& row_tables(int ovs) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto& slot = row_cache_[ovs];
    if (!slot.rows.empty()) return slot;
    SpaceGrid fine(grid_.d, grid_.n * ovs, grid_.L);
    std::size_t fvol = fine.size();
    int rank = coef_.rank();
    slot.rows.assign(rank, std::vector<std::complex<double>>(fvol));
    slot.xi.assign(grid_.d, std::vector<double>(fvol));
    if (grid_.d == 1) {
      for (int k = 0; k < fine.n; ++k) {
        double xi = fine.freq(k);
        slot.xi[0][std::size_t(k)] = xi;
        for (int m = 0; m < rank; ++m) slot.rows[std::size_t(m)][std::size_t(k)] = sym_.row(m, xi);
      }
    } else {
      for (int k0 = 0; k0 < fine.n; ++k0)
        for (int k1 = 0; k1 < fine.n; ++k1) {
          std::size_t kidx = fine.id(k0, k1);
          double x0 = fine.freq(k0), x1 = fine.freq(k1);
          double s = std::sqrt(x0 * x0 + x1 * x1);
          slot.xi[0][kidx] = x0;
          slot.xi[1][kidx] = x1;
          for (int m = 0; m < rank; ++m)
            slot.rows[std::size_t(m)][kidx] = sym_.re_row(m, s);
        }
    }
    return slot;
  }

  void subsample(const std::vector<double>& fine_field, int ovs, double* dst) const {
    int n = grid_.n;
    if (grid_.d == 1) {
      for (int j = 0; j < n; ++j) dst[j] = fine_field[std::size_t(j) * ovs];
      return;
    }
    std::size_t fn = std::size_t(n) * ovs;
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1)
        dst[grid_.id(j0, j1)] = fine_field[std::size_t(j0) * ovs * fn + std::size_t(j1) * ovs];
  }

  SpaceGrid grid_;
  CoefficientField coef_;
  double tol_alias_;
  int ovs_cap_;
  SymbolTable sym_;
  mutable std::map<int, RowTables> row_cache_;
  mutable std::mutex cache_mutex_;
};

}  // namespace levyheat
