#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "levyheat/fft.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/measure.hpp"
#include "levyheat/oracle.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"

using namespace levyheat;
using Catch::Approx;

TEST_CASE("cauchy closed form: values and identities") {
  CHECK(oracle::cauchy_pdf(1.0, 0.0) == Approx(1.0 / (pi * pi)).epsilon(1e-14));

  // mass over [-R, R] against the arctan primitive, quadrature at 1e-10
  double t = 0.7, R = 50.0;
  double quad = integrate_refine([&](double x) { return oracle::cauchy_pdf(t, x); }, -R, R, 1e-12, 16);
  double exact = (std::atan(R / (pi * t)) - std::atan(-R / (pi * t))) / pi;
  CHECK(quad == Approx(exact).epsilon(1e-10));

  // 1-stable self-similarity p(t,x) = t^{-1} p(1, x/t)
  for (double x : {0.0, 0.3, 2.0, 11.0})
    CHECK(oracle::cauchy_pdf(2.5, x) == Approx(oracle::cauchy_pdf(1.0, x / 2.5) / 2.5).epsilon(1e-14));

  // derivatives against centered differences
  double h = 1e-5;
  CHECK(oracle::cauchy_dx(0.8, 0.9) ==
        Approx((oracle::cauchy_pdf(0.8, 0.9 + h) - oracle::cauchy_pdf(0.8, 0.9 - h)) / (2 * h))
            .epsilon(1e-7));
  CHECK(oracle::cauchy_dt(0.8, 0.9) ==
        Approx((oracle::cauchy_pdf(0.8 + h, 0.9) - oracle::cauchy_pdf(0.8 - h, 0.9)) / (2 * h))
            .epsilon(1e-7));
}

TEST_CASE("periodized cauchy kernel matches the image sum") {
  double L = 10.0;
  for (double t : {0.05, 0.4, 2.0})
    for (double x : {0.0, 1.7, -6.3, 9.9}) {
      long M = 20000;
      double s = 0;
      for (long m = -M; m <= M; ++m) s += oracle::cauchy_pdf(t, x + 2 * L * m);
      s += t / (2 * L * L * M);  // integral tail of the image ladder
      CHECK(oracle::cauchy_torus(t, x, L) == Approx(s).epsilon(1e-8));
    }
}

TEST_CASE("oscillatory fourier inversion reproduces the cauchy kernel") {
  auto psi = [](double xi) { return pi * xi; };
  for (double t : {0.1, 1.0})
    for (double x : {0.0, 0.5, 4.0, 25.0})
      CHECK(oracle::fourier_inverse_1d(psi, t, x, 1e-12) ==
            Approx(oracle::cauchy_pdf(t, x)).epsilon(1e-8));
}

TEST_CASE("stable exponent constants agree with direct quadrature") {
  CHECK(oracle::stable_psi_coeff_1d(1.0) == Approx(pi).epsilon(1e-12));
  for (double a : {0.6, 1.4}) {
    // 1 - cos u written as 2 sin²(u/2): exact near 0, so the power substitution
    // sees the true u^{1-a} behaviour instead of rounding noise
    auto f = [&](double u) {
      double s = std::sin(0.5 * u);
      return 2.0 * s * s * std::pow(u, -1.0 - a);
    };
    double R = 3000.0;
    double c = integrate_power_singular(f, 0.0, 1.0, 1.0 - a, 1e-12) +
               integrate_refine(f, 1.0, R, 1e-12, 20);
    c += std::pow(R, -a) / a;  // ∫_R^∞ u^{-1-a} du; the cosine part is O(R^{-1-a})
    CHECK(oracle::stable_psi_coeff_1d(a) == Approx(2 * c).epsilon(1e-4));
  }
  // tempered exponent: compare against its derivative identity by quadrature
  for (double s : {0.5, 3.0}) {
    double v = integrate_refine([&](double u) { return 2.0 * std::atan(u); }, 0.0, s, 1e-12, 12);
    CHECK(oracle::tempered_psi_1d(s) == Approx(v).epsilon(1e-10));
  }
}

TEST_CASE("riemann convolution: identity, symmetry, spectral agreement") {
  SpaceGrid g(1, 128, 5.0);
  int n = g.n;
  std::vector<double> f(g.size()), h(g.size()), spike(g.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = g.coord(i);
    f[std::size_t(i)] = std::exp(std::sin(pi * x / g.L));
    h[std::size_t(i)] = std::cos(2 * pi * x / g.L) + 0.3 * std::sin(3 * pi * x / g.L);
  }
  spike[17] = 1.0 / g.cell();

  auto idf = oracle::riemann_convolution(g, spike, h);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(idf[std::size_t(i)] - h[std::size_t(g.wrap_index(i - 17))]));
  CHECK(worst < 1e-12);

  auto fg = oracle::riemann_convolution(g, f, h);
  auto gf = oracle::riemann_convolution(g, h, f);
  for (int i = 0; i < n; ++i) CHECK(fg[std::size_t(i)] == Approx(gf[std::size_t(i)]).margin(1e-12));

  // spectral witness
  Fft fft(1, n);
  std::vector<std::complex<double>> fa(f.begin(), f.end()), ha(h.begin(), h.end());
  fft.forward(fa.data());
  fft.forward(ha.data());
  for (int k = 0; k < n; ++k) fa[std::size_t(k)] *= ha[std::size_t(k)];
  fft.backward(fa.data());
  for (int i = 0; i < n; ++i)
    CHECK(fg[std::size_t(i)] ==
          Approx(fa[std::size_t(i)].real() / n * g.cell()).margin(1e-10));
}

TEST_CASE("riemann convolution in two dimensions") {
  SpaceGrid g(2, 16, 3.0);
  int n = g.n;
  std::vector<double> f(g.size()), h(g.size()), spike(g.size(), 0.0);
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1) {
      double x0 = g.coord(i0), x1 = g.coord(i1);
      f[std::size_t(i0) * n + i1] = std::exp(0.4 * std::sin(pi * x0 / g.L)) * std::cos(pi * x1 / g.L);
      h[std::size_t(i0) * n + i1] = std::cos(2 * pi * (x0 - 0.5 * x1) / g.L);
    }
  spike[std::size_t(3) * n + 11] = 1.0 / g.cell();

  auto idf = oracle::riemann_convolution(g, spike, h);
  double worst = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      worst = std::max(worst, std::abs(idf[std::size_t(i0) * n + i1] -
                                       h[std::size_t(g.wrap_index(i0 - 3)) * n +
                                         g.wrap_index(i1 - 11)]));
  CHECK(worst < 1e-12);

  auto fg = oracle::riemann_convolution(g, f, h);
  auto gf = oracle::riemann_convolution(g, h, f);
  double wc = 0;
  for (std::size_t j = 0; j < fg.size(); ++j) wc = std::max(wc, std::abs(fg[j] - gf[j]));
  CHECK(wc < 1e-12);

  Fft fft(2, n);
  std::vector<std::complex<double>> fa(f.begin(), f.end()), ha(h.begin(), h.end());
  fft.forward(fa.data());
  fft.forward(ha.data());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= ha[k];
  fft.backward(fa.data());
  double ws = 0;
  for (std::size_t j = 0; j < fg.size(); ++j)
    ws = std::max(ws, std::abs(fg[j] - fa[j].real() / double(n * n) * g.cell()));
  CHECK(ws < 1e-10);
}
