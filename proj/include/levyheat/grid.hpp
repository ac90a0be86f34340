#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "levyheat/util.hpp"

namespace levyheat {

// Periodic lattice on [-L, L)^d, d in {1,2}, n points per axis (a power of
// two). Axis 0 is the coefficient axis: every coefficient field varies along
// x0 only, so two-point fields collapse to (x0, y0, wrapped x1-y1) in d=2.
struct SpaceGrid {
  int d = 1;
  int n = 0;
  double L = 0;

  SpaceGrid(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    require_config(d == 1 || d == 2, "spatial dimension must be 1 or 2");
    require_config(n >= 8 && (n & (n - 1)) == 0, "lattice size must be a power of two >= 8");
    require_config(L > 0, "domain half-length must be positive");
  }

  double dx() const { return 2 * L / n; }
  double cell() const { return d == 1 ? dx() : dx() * dx(); }
  std::size_t axis() const { return std::size_t(n); }
  std::size_t size() const { return d == 1 ? std::size_t(n) : std::size_t(n) * n; }

  double coord(int i) const { return -L + i * dx(); }
  double wrap(double v) const { return v - 2 * L * std::round(v / (2 * L)); }
  int wrap_index(int i) const {
    int m = i & (n - 1);
    return m;
  }
  // nearest lattice index of a physical coordinate (periodic)
  int index_near(double x) const { return wrap_index(int(std::lround((x + L) / dx()))); }

  // signed frequency of FFT bin j (spacing π/L)
  double freq(int j) const {
    int s = j <= n / 2 ? j : j - n;
    return s * pi / L;
  }
  double nyquist() const { return (n / 2) * pi / L; }
  // largest |ξ| on the d-dimensional frequency lattice (corner in d=2)
  double xi_max() const { return nyquist() * std::sqrt(double(d)); }

  std::size_t id(int i0, int i1 = 0) const {
    return d == 1 ? std::size_t(i0) : std::size_t(i0) * n + i1;
  }
};

// Time ladder graded toward 0: node j sits at t_final·(j/m)^power, plus any
// requested anchors (snapped in, duplicates removed). Node 0 is dropped —
// fields live at strictly positive times.
inline std::vector<double> graded_times(double t_final, int m, double power,
                                        const std::vector<double>& anchors = {}) {
  require_config(t_final > 0 && m >= 2, "time ladder needs t_final > 0 and >= 2 nodes");
  std::vector<double> out;
  out.reserve(std::size_t(m) + anchors.size());
  for (int j = 1; j <= m; ++j) out.push_back(t_final * std::pow(double(j) / m, power));
  for (double a : anchors) {
    require_config(a > 0 && a <= t_final * (1 + 1e-12), "time anchor outside (0, t_final]");
    out.push_back(std::min(a, t_final));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
            out.end());
  return out;
}

}  // namespace levyheat
