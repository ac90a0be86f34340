#include <catch2/catch_amalgamated.hpp>

#include "levyheat/coefficient.hpp"
#include "levyheat/oracle.hpp"
#include "levyheat/symbol.hpp"

using namespace levyheat;
using Catch::Approx;

TEST_CASE("bare d=1 symbols match the stable closed forms") {
  for (double alpha : {0.6, 1.0, 1.5}) {
    auto p = make_stable(1, alpha);
    SymbolTable tab(p, {0.0}, Compensation::symmetric, 2e4);
    double c = oracle::stable_psi_coeff_1d(alpha);
    for (double s : {0.01, 0.3, 1.0, 7.0, 100.0, 5000.0})
      CHECK(tab.bare(s) == Approx(c * std::pow(s, alpha)).epsilon(1e-9));
    CHECK(tab.bare(0.0) == 0.0);
  }
}

TEST_CASE("tempered d=1 symbol matches its closed form") {
  auto p = make_tempered_stable(1, 1.0);
  SymbolTable tab(p, {0.0}, Compensation::symmetric, 5e3);
  for (double s : {0.05, 0.8, 3.0, 40.0, 900.0})
    CHECK(tab.bare(s) == Approx(oracle::tempered_psi_1d(s)).epsilon(1e-9));
}

TEST_CASE("bare d=2 symbols match the stable closed forms") {
  for (double alpha : {1.0, 1.5}) {
    auto p = make_stable(2, alpha);
    SymbolTable tab(p, {0.0}, Compensation::symmetric, 500.0);
    double c = oracle::stable_psi_coeff_2d(alpha);
    for (double s : {0.05, 0.7, 4.0, 60.0, 400.0})
      CHECK(tab.bare(s) == Approx(c * std::pow(s, alpha)).epsilon(1e-8));
  }
}

TEST_CASE("truncated d=1 symbol: quadratic onset and linear growth") {
  // nu = r^{-2} cut at r=2: psi(s) -> 2 s² ∫_0^2 r²·r^{-2}/2·... = 2s² as
  // s -> 0 (integrand s²r²/2 · 2r^{-2}) and psi(s) = πs - 1 + O(1/s) large s.
  auto p = make_truncated_stable(1, 1.0, 2.0);
  SymbolTable tab(p, {0.0}, Compensation::symmetric, 5e3);
  CHECK(tab.bare(0.01) == Approx(2.0 * sqr(0.01)).epsilon(1e-3));
  CHECK(tab.bare(2000.0) == Approx(pi * 2000.0 - 1.0).epsilon(1e-5));
}

TEST_CASE("modulated d=1 row reduces to the shifted bare symbol") {
  // alpha = 1: ½π(s+k) + ½π|s-k| - πk = π(s-k)_+ exactly.
  auto p = make_stable(1, 1.0);
  double k = 2.0;
  SymbolTable tab(p, {0.0, k}, Compensation::symmetric, 1e3);
  CHECK(tab.re_row(1, 0.5) == Approx(0.0).margin(1e-9));
  CHECK(tab.re_row(1, 2.0) == Approx(0.0).margin(1e-8));
  for (double s : {2.5, 3.0, 10.0, 300.0})
    CHECK(tab.re_row(1, s) == Approx(pi * (s - k)).epsilon(1e-8));
  // row 0 is the bare symbol
  CHECK(tab.re_row(0, 3.0) == Approx(pi * 3.0).epsilon(1e-9));
  // symmetric case carries no skew part
  CHECK(tab.im_row(0, 3.0) == 0.0);
  CHECK(tab.im_row(1, 3.0) == 0.0);
}

TEST_CASE("skewed density, no compensation: sine transform of the odd part") {
  double alpha = 0.6, eta = 0.3;
  auto p = make_skewed(make_stable(1, alpha), eta);
  SymbolTable tab(p, {0.0}, Compensation::none, 1e3);
  CHECK(tab.skewed());
  double c_im = 2.0 * eta * oracle::stable_sin_coeff(alpha);
  double c_re = oracle::stable_psi_coeff_1d(alpha);
  for (double s : {0.2, 1.0, 15.0, 400.0}) {
    CHECK(tab.im_row(0, s) == Approx(c_im * std::pow(s, alpha)).epsilon(1e-8));
    // the even part ignores the tilt
    CHECK(tab.re_row(0, s) == Approx(c_re * std::pow(s, alpha)).epsilon(1e-9));
  }
  // signed frequency: psi(ξ) = Re - i sgn(ξ) Im convention
  auto z = tab.row(0, -1.0);
  CHECK(z.real() == Approx(c_re).epsilon(1e-9));
  CHECK(z.imag() == Approx(c_im).epsilon(1e-8));
}

TEST_CASE("skewed density, full compensation: compensated sine transform") {
  double alpha = 1.5, eta = 0.25;
  auto p = make_skewed(make_stable(1, alpha), eta);
  double k = 1.5;
  SymbolTable tab(p, {0.0, k}, Compensation::full, 1e3);
  double ct = 2.0 * eta * oracle::stable_sin_comp_coeff(alpha);
  CHECK(ct < 0);
  for (double s : {0.3, 2.0, 50.0})
    CHECK(tab.im_row(0, s) == Approx(ct * std::pow(s, alpha)).epsilon(1e-8));
  // modulated row: ½c̃(s+k)^α + ½sgn(s-k)c̃|s-k|^α + s·C with
  // C = 2η ∫ (1-cos k r) r^{-1-(α-1)} dr = 2η k^{α-1}(-Γ(1-α))cos(π(α-1)/2)
  double cc = 2.0 * eta * std::pow(k, alpha - 1.0) * (-std::tgamma(1.0 - alpha)) *
              std::cos(pi * (alpha - 1.0) / 2);
  for (double s : {0.4, 1.5, 6.0, 90.0}) {
    double want = 0.5 * ct * std::pow(s + k, alpha) +
                  0.5 * (s >= k ? 1.0 : -1.0) * ct * std::pow(std::abs(s - k), alpha) + s * cc;
    CHECK(tab.im_row(1, s) == Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("compensation rules reject inadmissible inputs") {
  auto sym = make_stable(1, 1.5);
  auto skew = make_skewed(make_stable(1, 0.6), 0.3);
  CHECK_THROWS_AS(SymbolTable(skew, {0.0}, Compensation::symmetric, 10.0), Error);
  CHECK_THROWS_AS(SymbolTable(sym, {0.0}, Compensation::none, 10.0), Error);
  CHECK_THROWS_AS(SymbolTable(make_stable(1, 0.6), {0.0}, Compensation::full, 10.0), Error);
  // truncated tails always have first moments, so full compensation is fine
  CHECK_NOTHROW(SymbolTable(make_truncated_stable(1, 0.6, 1.0), {0.0}, Compensation::full, 10.0));
}

TEST_CASE("symbol envelope is comparable to h at the reciprocal radius") {
  // bare(s) / h(1/s) stays inside [1/(8(1+2d)), 2]; π/4 for the d=1 Cauchy
  // profile.
  auto check_window = [](const LevyProfile& p, double s_lo, double s_hi) {
    SymbolTable tab(p, {0.0}, Compensation::symmetric, s_hi * 1.1);
    double lo = 1.0 / (8.0 * (1.0 + 2.0 * p.d)), hi = 2.0;
    for (double s = s_lo; s <= s_hi; s *= 3.7) {
      double ratio = tab.bare(s) / h_of(p, 1.0 / s);
      CHECK(ratio >= lo);
      CHECK(ratio <= hi);
    }
  };
  check_window(make_stable(1, 1.0), 0.02, 2e3);
  check_window(make_stable(1, 1.5), 0.02, 2e3);
  check_window(make_stable(1, 0.6), 0.02, 2e3);
  check_window(make_stable(2, 1.0), 0.05, 300.0);
  check_window(make_tempered_stable(1, 1.0), 0.02, 2e3);

  auto cauchy = make_stable(1, 1.0);
  SymbolTable tab(cauchy, {0.0}, Compensation::symmetric, 100.0);
  CHECK(tab.bare(5.0) / h_of(cauchy, 0.2) == Approx(pi / 4).epsilon(1e-8));
}

TEST_CASE("d=2 modulated row behaves sanely") {
  auto p = make_stable(2, 1.0);
  SymbolTable tab(p, {0.0, 1.0}, Compensation::symmetric, 200.0);
  // k=0 row is the bare symbol
  CHECK(tab.re_row(0, 3.0) == Approx(tab.bare(3.0)));
  // modulated row vanishes at s -> 0 and is dominated by the bare row
  CHECK(std::abs(tab.re_row(1, 1e-6)) < 1e-4);
  for (double s : {0.5, 2.0, 20.0, 150.0}) {
    CHECK(std::isfinite(tab.re_row(1, s)));
    CHECK(std::abs(tab.re_row(1, s)) < tab.bare(s));
  }
}

TEST_CASE("coefficient fields certify their bounds") {
  double L = 64.0;

  auto c = CoefficientField::constant(0.8, L);
  CHECK(c.rank() == 1);
  CHECK(c.kappa(3.0, 1.0) == Approx(0.8));
  CHECK(c.kappa0 == 0.8);
  CHECK(c.kappa1 == 0.8);

  auto t = CoefficientField::tanh_ramp(1.0, 0.25, L);
  CHECK(t.kappa0 == Approx(1.0));
  CHECK(t.kappa1 == Approx(1.25));
  // exact on the line away from the seam collar
  for (double x : {-40.0, -2.0, 0.0, 1.5, 40.0})
    CHECK(t.a(0, x) == Approx(1.0 + 0.25 * 0.5 * (1.0 + std::tanh(x))).epsilon(1e-15));
  // continuous across the seam, equal one-sided limits
  CHECK(t.a(0, L - 1e-9) == Approx(t.a(0, -L + 1e-9)).margin(1e-8));
  // blended values stay inside the certified range, slope within certificate
  double prev = t.a(0, -L);
  for (double x = -L; x <= L; x += 0.01) {
    double v = t.a(0, x);
    CHECK(v >= t.kappa0 - 1e-12);
    CHECK(v <= t.kappa1 + 1e-12);
    CHECK(std::abs(v - prev) <= t.kappa2 * 0.01 * (1 + 1e-9) + 1e-12);
    prev = v;
  }

  auto q = CoefficientField::cosine(1.0, 0.2, pi / L * 4, 0.1, 1.5, L);
  CHECK(q.rank() == 2);
  CHECK(q.kappa0 == Approx(0.7));
  CHECK(q.kappa1 == Approx(1.3));
  CHECK(q.zk(1) == 1.5);
  // exactly periodic: no seam adjustment anywhere
  CHECK(q.a(0, L) == Approx(q.a(0, -L)).margin(1e-14));
  CHECK(q.kappa(2.0, 0.7) ==
        Approx(1.0 + 0.2 * std::cos(pi / L * 4 * 2.0) +
               0.1 * std::cos(pi / L * 4 * 2.0) * std::cos(1.5 * 0.7)).epsilon(1e-14));
  // ellipticity check over a sample grid
  for (double x = -L; x < L; x += 0.37)
    for (double zr : {0.0, 0.9, 2.7}) {
      CHECK(q.kappa(x, zr) >= q.kappa0 - 1e-12);
      CHECK(q.kappa(x, zr) <= q.kappa1 + 1e-12);
    }

  auto s = CoefficientField::step(1.0, 0.5, 0.5, L);
  CHECK_FALSE(s.continuous);
  CHECK(s.a(0, 1e-9) - s.a(0, -1e-9) == Approx(0.5));

  CHECK_THROWS_AS(CoefficientField::cosine(1.0, 0.6, pi / L * 4, 0.5, 1.5, L), Error);
  CHECK_THROWS_AS(CoefficientField::cosine(1.0, 0.2, 0.1234, 0.1, 1.5, L), Error);
  CHECK_THROWS_AS(CoefficientField::tanh_ramp(0.1, -0.2, L), Error);
}

TEST_CASE("symbol tables stay accurate against a fresh finer build") {
  // same quantity through a table twice as dense: interpolation error control
  auto p = make_stable(1, 1.3);
  SymbolTable tab(p, {0.0}, Compensation::symmetric, 1e3);
  double c = oracle::stable_psi_coeff_1d(1.3);
  Rng rng(0x5EED, 7);
  for (int i = 0; i < 40; ++i) {
    double s = std::exp(rng.uniform(std::log(0.05), std::log(900.0)));
    CHECK(tab.bare(s) == Approx(c * std::pow(s, 1.3)).epsilon(1e-9));
  }
}
