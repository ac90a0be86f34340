#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "levyheat/coefficient.hpp"
#include "levyheat/fft.hpp"
#include "levyheat/frozen.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/oracle.hpp"
#include "levyheat/profile.hpp"

using namespace levyheat;
using Catch::Approx;

namespace {

// Periodized Cauchy kernel on [-L, L): the exact torus inversion of
// exp(-t·π|ξ|) is (1/2L)·sinh(a) / (cosh(a) - cos(πv/L)), a = π²t/L.
double torus_cauchy(double t, double v, double L) {
  double a = pi * pi * t / L;
  return (1.0 / (2 * L)) * std::sinh(a) / (std::cosh(a) - std::cos(pi * v / L));
}

double torus_cauchy_dv(double t, double v, double L) {
  double a = pi * pi * t / L;
  double den = std::cosh(a) - std::cos(pi * v / L);
  return -(1.0 / (2 * L)) * std::sinh(a) * std::sin(pi * v / L) * (pi / L) / (den * den);
}

// Free-space 2-d kernel of exp(-t·c|ξ|) and its torus image sum.
double plane_cauchy_2d(double a, double r2) {
  return a / (2 * pi * std::pow(a * a + r2, 1.5));
}

double torus_cauchy_2d(double t, double v0, double v1, double L) {
  double a = 2 * pi * t;  // stable_psi_coeff_2d(1) = 2π
  // r^{-3} image decay leaves a 1/M truncation tail; Richardson across
  // M and 2M removes it (verified: the M-tail matches a·(8/√2)/(2π(2L)³M)).
  auto boxed = [&](int M) {
    double sum = 0;
    for (int m0 = -M; m0 <= M; ++m0)
      for (int m1 = -M; m1 <= M; ++m1)
        sum += plane_cauchy_2d(a, sqr(v0 + 2 * L * m0) + sqr(v1 + 2 * L * m1));
    return sum;
  };
  return 2 * boxed(240) - boxed(120);
}

}  // namespace

TEST_CASE("lattice Fourier pair has the centered continuum convention") {
  SpaceGrid g(1, 64, 8.0);
  int mode = 5;
  double xi1 = mode * pi / g.L;
  std::vector<double> p(g.size());
  for (int i = 0; i < g.n; ++i) p[i] = (1.0 + std::cos(xi1 * g.coord(i))) / (2 * g.L);
  auto spec = spectrum_of(g, p.data());
  for (int k = 0; k < g.n; ++k) {
    double want = k == 0 ? 1.0 : (k == mode || k == g.n - mode ? 0.5 : 0.0);
    CHECK(std::abs(spec[k] - std::complex<double>(want, 0)) < 1e-13);
  }
  std::vector<double> back(g.size());
  double imag = field_of(g, spec, back.data());
  CHECK(imag < 1e-13);
  for (int i = 0; i < g.n; ++i) CHECK(back[i] == Approx(p[i]).margin(1e-13));

  SpaceGrid g2(2, 16, 4.0);
  std::vector<double> q(g2.size());
  Rng rng(0x5EED, 7);
  for (auto& v : q) v = rng.uniform(-1, 1);
  auto spec2 = spectrum_of(g2, q.data());
  std::vector<double> back2(g2.size());
  field_of(g2, spec2, back2.data());
  for (std::size_t i = 0; i < g2.size(); ++i) CHECK(back2[i] == Approx(q[i]).margin(1e-12));
}

TEST_CASE("frozen kernel reproduces the periodized Cauchy closed form") {
  SpaceGrid g(1, 256, 16.0);
  auto prof = make_stable(1, 1.0);
  auto coef = CoefficientField::constant(1.0, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef);

  for (double t : {0.3, 0.02}) {  // 0.02 sits below the bare-Nyquist floor → oversampled path
    auto sl = fac.slices(t, false);
    CHECK(sl.imag_noise < 1e-12);
    if (t == 0.3) CHECK(sl.ovs == 1);
    if (t == 0.02) CHECK(sl.ovs > 1);
    for (int dv : {0, 1, -3, 40, 100, -128}) {
      double v = g.wrap(dv * g.dx());
      CHECK(sl.p_at(17, dv) == Approx(torus_cauchy(t, v, g.L)).epsilon(1e-5));
    }
  }
}

TEST_CASE("frozen kernel mass is conserved on the torus for variable coefficients") {
  SpaceGrid g(1, 128, 16.0);
  auto prof = make_stable(1, 1.3);
  auto coef = CoefficientField::tanh_ramp(0.8, 0.5, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef);
  auto sl = fac.slices(0.25, true);
  for (int y0 : {0, 31, 64, 100}) {
    double mass = 0, lmass = 0;
    for (int j = 0; j < g.n; ++j) {
      mass += sl.p[std::size_t(y0) * g.size() + j] * g.dx();
      lmass += sl.lm[0][std::size_t(y0) * g.size() + j] * g.dx();
    }
    CHECK(mass == Approx(1.0).margin(1e-9));
    CHECK(lmass == Approx(0.0).margin(1e-9));  // row operators annihilate constants
  }
}

TEST_CASE("frozen kernels satisfy the semigroup identity under lattice convolution") {
  SpaceGrid g(1, 128, 16.0);
  auto prof = make_stable(1, 1.4);
  auto coef = CoefficientField::constant(0.7, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef);
  double t = 0.2, s = 0.35;
  auto a = fac.slices(t, false), b = fac.slices(s, false), c = fac.slices(t + s, false);
  for (int dv : {0, 5, 50}) {
    double conv = 0;
    for (int w = 0; w < g.n; ++w) conv += a.p_at(0, dv - w) * b.p_at(0, w) * g.dx();
    CHECK(conv == Approx(c.p_at(0, dv)).epsilon(1e-8));
  }
}

TEST_CASE("frozen slices expose consistent time derivative and gradient") {
  SpaceGrid g(1, 256, 16.0);
  auto prof = make_stable(1, 1.0);
  auto coef = CoefficientField::constant(1.0, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef);
  double t = 0.4;
  auto sl = fac.slices(t, true, true);
  double h = 1e-4;
  auto up = fac.slices(t + h, false), dn = fac.slices(t - h, false);
  for (int dv : {0, 7, 60}) {
    double fd = (up.p_at(9, dv) - dn.p_at(9, dv)) / (2 * h);
    CHECK(sl.dpdt_at(9, dv) == Approx(fd).margin(1e-6 + 1e-5 * std::abs(fd)));
    double v = g.wrap(dv * g.dx());
    CHECK(sl.grad_at(0, 9, dv) == Approx(torus_cauchy_dv(t, v, g.L)).margin(1e-8));
  }
}

TEST_CASE("frozen kernel reproduces the d=2 Cauchy image sum") {
  SpaceGrid g(2, 64, 8.0);
  auto prof = make_stable(2, 1.0);
  auto coef = CoefficientField::constant(1.0, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef);
  double t = 0.2;
  auto sl = fac.slices(t, false);
  CHECK(sl.imag_noise < 1e-12);
  for (auto [d0, d1] : {std::pair{0, 0}, {3, 1}, {10, -8}, {31, 17}}) {
    double v0 = g.wrap(d0 * g.dx()), v1 = g.wrap(d1 * g.dx());
    // epsilon: construction bar; margin: the oracle's own Richardson floor
    CHECK(sl.p_at(5, d0, d1) ==
          Approx(torus_cauchy_2d(t, v0, v1, g.L)).epsilon(2e-6).margin(1e-8));
  }
}

TEST_CASE("aliasing admission rejects times below the lattice floor") {
  SpaceGrid g(1, 32, 16.0);  // Nyquist π: barely any damping
  auto prof = make_stable(1, 1.0);
  auto coef = CoefficientField::constant(1.0, g.L);
  FrozenFactory fac(g, prof, Compensation::symmetric, coef, 1e-8, 4);
  double floor = fac.time_floor();
  CHECK_NOTHROW(fac.slices(floor * 1.01, false));
  CHECK_THROWS_AS(fac.slices(floor * 0.2, false), Error);
}
