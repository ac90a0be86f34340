#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "levyheat/util.hpp"

namespace levyheat {

// Separable coefficient kappa(x, z) = sum_m a_m(x0) * cos(zk_m |z|), realized
// 2L-periodically in x0. Non-periodic x-factors are blended to their seam
// mean over a C^2 collar of width blend_w at |x0| = L, so the torus
// realization is continuous and matches the line function exactly on
// |x0| <= L - blend_w. Every builder certifies ellipticity bounds
// 0 < kappa0 <= kappa <= kappa1 and a regularity modulus
// |kappa(x,.) - kappa(y,.)| <= kappa2 |x-y|^beta (claimed only, for the
// deliberately irregular step field).
class CoefficientField {
 public:
  int rank() const { return int(rows_.size()); }
  double zk(int m) const { return rows_[std::size_t(m)].zk; }
  std::vector<double> frequencies() const {
    std::vector<double> ks;
    ks.reserve(rows_.size());
    for (const Row& r : rows_) ks.push_back(r.zk);
    return ks;
  }
  double a_lo(int m) const { return rows_[std::size_t(m)].lo; }
  double a_hi(int m) const { return rows_[std::size_t(m)].hi; }

  // Blended periodic x-factor; x0 may sit outside the fundamental domain.
  double a(int m, double x0) const {
    const Row& r = rows_[std::size_t(m)];
    double x = wrap(x0);
    if (r.periodic) return r.f(x);
    double ax = std::abs(x), edge = L - blend_w;
    if (ax <= edge) return r.f(x);
    double w = 1.0 - smoothstep((ax - edge) / blend_w);
    return r.seam + w * (r.f(x) - r.seam);
  }

  double kappa(double x0, double zr) const {
    double v = 0;
    for (int m = 0; m < rank(); ++m) {
      double b = rows_[std::size_t(m)].zk == 0 ? 1.0 : std::cos(rows_[std::size_t(m)].zk * zr);
      v += a(m, x0) * b;
    }
    return v;
  }

  std::string name;
  double L = 0;        // torus half-period of the realization
  double blend_w = 0;  // seam collar width (0: all rows periodic)
  double kappa0 = 0, kappa1 = 0;  // certified ellipticity bounds
  double kappa2 = 0, beta = 1;    // regularity modulus (claimed for `step`)
  bool continuous = true;

  static CoefficientField constant(double c, double L) {
    require_config(c > 0, "constant coefficient must be positive");
    CoefficientField cf;
    cf.name = "constant";
    cf.L = L;
    cf.kappa0 = cf.kappa1 = c;
    cf.kappa2 = 0;
    cf.rows_.push_back({[c](double) { return c; }, c, c, 0.0, 0.0, true, c});
    return cf;
  }

  // base + amp * (1 + tanh(x0)) / 2
  static CoefficientField tanh_ramp(double base, double amp, double L, double blend_w = 0) {
    CoefficientField cf;
    cf.name = "tanh-ramp";
    cf.L = L;
    cf.blend_w = blend_w > 0 ? blend_w : L / 8;
    auto f = [base, amp](double x) { return base + amp * 0.5 * (1.0 + std::tanh(x)); };
    double lo = std::min(base, base + amp), hi = std::max(base, base + amp);
    require_config(lo > 0, "coefficient range must stay positive");
    double seam = 0.5 * (f(L) + f(-L));
    // slope of the line function plus the collar correction
    double lip = 0.5 * std::abs(amp) + (15.0 / 8.0) / cf.blend_w * 0.5 * std::abs(amp);
    cf.kappa0 = lo;
    cf.kappa1 = hi;
    cf.kappa2 = lip;
    cf.rows_.push_back({f, lo, hi, lip, 0.0, false, seam});
    return cf;
  }

  // base + ax cos(kx x0) + az cos(kx x0) cos(kz |z|); kx must be a multiple
  // of pi/L so the field is exactly periodic (no seam blend needed).
  static CoefficientField cosine(double base, double ax, double kx, double az, double kz,
                                 double L) {
    CoefficientField cf;
    cf.name = "cosine";
    cf.L = L;
    double snap = std::round(kx * L / pi) * pi / L;
    require_config(std::abs(kx - snap) <= 1e-12 * std::max(1.0, std::abs(kx)),
                   "x-frequency must be an integer multiple of pi / L");
    require_config(kz > 0, "z-modulated row needs a positive z-frequency");
    double k0 = base - std::abs(ax) - std::abs(az);
    require_config(k0 > 0, "cosine amplitudes exceed the ellipticity budget");
    cf.kappa0 = k0;
    cf.kappa1 = base + std::abs(ax) + std::abs(az);
    cf.kappa2 = std::abs(kx) * (std::abs(ax) + std::abs(az));
    cf.rows_.push_back({[base, ax, kx](double x) { return base + ax * std::cos(kx * x); },
                        base - std::abs(ax), base + std::abs(ax),
                        std::abs(kx) * std::abs(ax), 0.0, true, base});
    cf.rows_.push_back({[az, kx](double x) { return az * std::cos(kx * x); }, -std::abs(az),
                        std::abs(az), std::abs(kx) * std::abs(az), kz, true, 0.0});
    return cf;
  }

  // base + amp * 1{x0 > 0}: genuinely discontinuous at 0 (the seam is still
  // blended); carries only a claimed modulus for control runs.
  static CoefficientField step(double base, double amp, double claimed_beta, double L,
                               double blend_w = 0) {
    CoefficientField cf;
    cf.name = "step";
    cf.L = L;
    cf.blend_w = blend_w > 0 ? blend_w : L / 8;
    cf.continuous = false;
    auto f = [base, amp](double x) { return x > 0 ? base + amp : base; };
    double lo = std::min(base, base + amp), hi = std::max(base, base + amp);
    require_config(lo > 0, "coefficient range must stay positive");
    cf.kappa0 = lo;
    cf.kappa1 = hi;
    cf.kappa2 = std::abs(amp);  // claimed, not a true modulus
    cf.beta = claimed_beta;
    cf.rows_.push_back({f, lo, hi, 0.0, 0.0, false, 0.5 * (f(L) + f(-L))});
    return cf;
  }

 private:
  struct Row {
    std::function<double(double)> f;
    double lo, hi, lip;
    double zk;
    bool periodic;
    double seam;
  };

  double wrap(double x0) const { return x0 - 2 * L * std::round(x0 / (2 * L)); }

  static double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  }

  std::vector<Row> rows_;
};

}  // namespace levyheat
