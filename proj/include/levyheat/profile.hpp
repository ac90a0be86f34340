#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "levyheat/quadrature.hpp"
#include "levyheat/util.hpp"

namespace levyheat {

// Far-field behaviour of the radial jump density, used for analytic tail
// handling in quadratures and for image corrections.
enum class TailClass { power, exponential, truncated };

// Isotropic (up to an optional bounded angular factor) jump intensity
// J(z) = nu(|z|) * asym(z). nu must be positive and non-increasing on (0,∞)
// with the usual integrability at 0; admission is checked where it matters.
struct LevyProfile {
  int d = 1;
  std::string name;
  std::function<double(double)> nu;     // radial density, r > 0
  double sing_hint = 2.0;               // nu(r) ~ r^{-d-sing_hint} near 0
  TailClass tail = TailClass::power;
  double tail_exponent = 2.0;           // nu ~ coeff * r^{-d-tail_exponent}
  double support_radius = std::numeric_limits<double>::infinity();
  // Optional angular factor a(z) with mean 1 on the sphere; d=1 only needs
  // the two half-line weights a(+r), a(-r).
  std::function<double(const std::array<double, 2>&)> asym;
  // Optional analytic tail mass ∫_{|z|≥R} J dz; supplied when the generic
  // geometric-panel quadrature converges too slowly (sub-power tails).
  std::function<double(double)> tail_mass_override;

  double j_density(const std::array<double, 2>& z) const {
    double r = d == 1 ? std::abs(z[0]) : std::hypot(z[0], z[1]);
    if (r <= 0 || r >= support_radius) return 0;
    double v = nu(r);
    if (asym) v *= asym(z);
    return v;
  }
  bool isotropic() const { return !asym; }
};

// Surface measure of the unit sphere boundary: 2 in d=1, 2π in d=2.
inline double sphere_surface(int d) {
  require_config(d == 1 || d == 2, "only d=1 and d=2 are supported");
  return d == 1 ? 2.0 : 2.0 * pi;
}

// Volume of the unit ball: 2 in d=1, π in d=2.
inline double ball_volume(int d) { return d == 1 ? 2.0 : pi; }

inline LevyProfile make_stable(int d, double alpha) {
  require_config(alpha > 0 && alpha < 2, "stable order must lie in (0,2)");
  LevyProfile p;
  p.d = d;
  p.name = "stable";
  p.sing_hint = alpha;
  p.tail = TailClass::power;
  p.tail_exponent = alpha;
  double dd = d;
  p.nu = [dd, alpha](double r) { return std::pow(r, -dd - alpha); };
  double s_d = sphere_surface(d);
  p.tail_mass_override = [s_d, alpha](double R) { return s_d * std::pow(R, -alpha) / alpha; };
  return p;
}

inline LevyProfile make_truncated_stable(int d, double alpha, double radius) {
  require_config(radius > 0, "truncation radius must be positive");
  LevyProfile p = make_stable(d, alpha);
  p.name = "truncated-stable";
  p.tail = TailClass::truncated;
  p.support_radius = radius;
  double s_d = sphere_surface(d);
  p.tail_mass_override = [s_d, alpha, radius](double R) {
    if (R >= radius) return 0.0;
    return s_d * (std::pow(R, -alpha) - std::pow(radius, -alpha)) / alpha;
  };
  return p;
}

// Tilt a d=1 profile: weight (1+eta) on the right half-line, (1-eta) on the
// left. |eta| < 1 keeps the density positive.
inline LevyProfile make_skewed(LevyProfile p, double eta) {
  require_config(p.d == 1, "half-line skew weights are a d=1 feature");
  require_config(std::abs(eta) < 1, "skew weight must keep the density positive");
  if (eta != 0) {
    p.name += "-skewed";
    p.asym = [eta](const std::array<double, 2>& z) { return z[0] > 0 ? 1 + eta : 1 - eta; };
  }
  return p;
}

inline LevyProfile make_tempered_stable(int d, double alpha) {
  require_config(alpha > 0 && alpha < 2, "stable order must lie in (0,2)");
  LevyProfile p;
  p.d = d;
  p.name = "tempered-stable";
  p.sing_hint = alpha;
  p.tail = TailClass::exponential;
  p.tail_exponent = alpha;
  double dd = d;
  p.nu = [dd, alpha](double r) { return std::exp(-r) * std::pow(r, -dd - alpha); };
  return p;
}

// Density r^{-d} [log(1+r^{a/2})]^{-2}: same weak scaling order a at both
// ends in the small-r window, with slowly varying corrections.
inline LevyProfile make_log_damped(int d, double alpha) {
  require_config(alpha > 0 && alpha < 2, "scaling order must lie in (0,2)");
  LevyProfile p;
  p.d = d;
  p.name = "log-damped";
  p.sing_hint = alpha;  // effective small-r order up to slowly varying factors
  p.tail = TailClass::power;
  p.tail_exponent = 0.0;  // heavier than any power-alpha tail; handled generically
  double dd = d;
  p.nu = [dd, alpha](double r) {
    double l = std::log1p(std::pow(r, alpha / 2));
    return std::pow(r, -dd) / (l * l);
  };
  // With w = log(1+r^{a/2}) and u = 1/w,
  //   ∫_R^∞ r^{-1} w^{-2} dr = (2/a) ∫_0^{1/W} du / (1 - e^{-1/u}),  W = w(R),
  // a finite smooth integral (integrand = 1 + exponentially small near 0).
  double s_d = sphere_surface(d);
  p.tail_mass_override = [s_d, alpha](double R) {
    double W = std::log1p(std::pow(R, alpha / 2));
    double ub = 1.0 / W;
    double I = ub + integrate_refine(
                        [](double u) {
                          double e = std::exp(-1.0 / u);
                          return e / (1.0 - e);
                        },
                        1e-12, ub, 1e-12);
    return s_d * (2.0 / alpha) * I;
  };
  return p;
}

}  // namespace levyheat
