#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levyheat/coefficient.hpp"
#include "levyheat/frozen.hpp"
#include "levyheat/generator.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/parametrix.hpp"
#include "levyheat/profile.hpp"

using namespace levyheat;

namespace {

std::size_t mat_size(const SpaceGrid& g) {
  std::size_t n = g.axis();
  return g.d == 1 ? n * n : n * n * n;
}

// [x, w] = p^{(w)}(t, x - w), transverse displacement in FFT-natural order
std::vector<double> frozen_mat(const SpaceGrid& g, const FrozenSlices& sl) {
  int n = g.n;
  std::vector<double> f(mat_size(g));
  if (g.d == 1) {
    for (int x = 0; x < n; ++x)
      for (int w = 0; w < n; ++w) f[std::size_t(x) * n + w] = sl.p_at(w, x - w);
    return f;
  }
  for (int x0 = 0; x0 < n; ++x0)
    for (int w0 = 0; w0 < n; ++w0) {
      double* row = f.data() + (std::size_t(x0) * n + w0) * n;
      for (int j1 = 0; j1 < n; ++j1) row[j1] = sl.p_at(w0, x0 - w0, j1);
    }
  return f;
}

double field_mass(const SpaceGrid& g, const std::vector<double>& f, int x0) {
  int n = g.n;
  double s = 0;
  if (g.d == 1) {
    for (int y = 0; y < n; ++y) s += f[std::size_t(x0) * n + y];
  } else {
    for (int y0 = 0; y0 < n; ++y0) {
      const double* row = f.data() + (std::size_t(x0) * n + y0) * n;
      for (int j1 = 0; j1 < n; ++j1) s += row[j1];
    }
  }
  return s * g.cell();
}

double sup_abs(const std::vector<double>& f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("constant coefficients leave the frozen kernel untouched") {
  SpaceGrid g(1, 128, 10.0);
  LevyProfile prof = make_stable(1, 1.3);
  CoefficientField coef = CoefficientField::constant(0.5, g.L);
  ParametrixParams prm;
  prm.t_final = 0.5;
  prm.nodes = 8;
  prm.detect_constant = false;  // push the zeros through the full march
  Parametrix px(g, prof, Compensation::symmetric, coef, prm);

  int last = int(px.times().size()) - 1;
  CHECK_FALSE(px.degenerate());
  CHECK(sup_abs(px.q_field(last)) == 0.0);
  CHECK(sup_abs(px.phi_field(last)) == 0.0);
  CHECK(sup_diff(px.kernel_field(last), px.frozen_field(last)) == 0.0);
  for (int x0 : {0, 37, 64})
    CHECK(std::abs(field_mass(g, px.kernel_field(last), x0) - 1.0) < 1e-6);

  // the detected degenerate path must agree with the marched one exactly
  ParametrixParams fast = prm;
  fast.detect_constant = true;
  Parametrix pf(g, prof, Compensation::symmetric, coef, fast);
  CHECK(pf.degenerate());
  CHECK(sup_abs(pf.q_field(last)) == 0.0);
  CHECK(sup_abs(pf.phi_field(last)) == 0.0);
  CHECK(sup_diff(pf.kernel_field(last), px.kernel_field(last)) == 0.0);
}

TEST_CASE("lattice composition reproduces the frozen semigroup") {
  KernelAlgebra alg1(SpaceGrid(1, 128, 10.0));
  {
    SpaceGrid g(1, 128, 10.0);
    LevyProfile prof = make_stable(1, 1.3);
    CoefficientField coef = CoefficientField::constant(0.6, g.L);
    FrozenFactory fac(g, prof, Compensation::symmetric, coef);
    auto pa = frozen_mat(g, fac.slices(0.4, false));
    auto pb = frozen_mat(g, fac.slices(0.3, false));
    auto pc = frozen_mat(g, fac.slices(0.7, false));
    std::vector<double> out(mat_size(g), 0.0);
    alg1.compose(pa.data(), pb.data(), 1.0, out.data());
    CHECK(sup_diff(out, pc) < 1e-6 * sup_abs(pc));
  }
  {
    SpaceGrid g(2, 32, 6.0);
    KernelAlgebra alg2(g);
    LevyProfile prof = make_stable(2, 1.4);
    CoefficientField coef = CoefficientField::constant(0.6, g.L);
    FrozenFactory fac(g, prof, Compensation::symmetric, coef);
    auto pa = frozen_mat(g, fac.slices(0.5, false));
    auto pb = frozen_mat(g, fac.slices(0.4, false));
    auto pc = frozen_mat(g, fac.slices(0.9, false));
    std::vector<double> out(mat_size(g), 0.0);
    alg2.compose(pa.data(), pb.data(), 1.0, out.data());
    CHECK(sup_diff(out, pc) < 1e-6 * sup_abs(pc));
  }
}

TEST_CASE("varying coefficients yield a conservative solution of the equation") {
  SpaceGrid g(1, 256, 10.0);
  LevyProfile prof = make_stable(1, 1.3);
  CoefficientField coef = CoefficientField::tanh_ramp(0.45, 0.25, g.L);
  ParametrixParams prm;
  prm.t_final = 0.6;
  prm.nodes = 14;
  prm.anchors = {0.294, 0.3, 0.306};
  Parametrix px(g, prof, Compensation::symmetric, coef, prm);

  int iT = int(px.times().size()) - 1;
  int ih = px.node(0.3);

  // the march settled everywhere
  for (int i = 1; i <= iT; ++i) {
    CHECK(px.picard_gap(i) <= prm.picard_tol);
    CHECK(px.picard_steps(i) < prm.picard_max);
  }

  // the correction is present but subordinate to the frozen part
  double sp = sup_abs(px.kernel_field(iT));
  double sphi = sup_abs(px.phi_field(iT));
  CHECK(sphi > 0.02 * sp);
  CHECK(sphi < 0.3 * sp);

  // conservation in the backward variable
  for (int i : {ih, iT})
    for (int x0 : {0, 61, 128, 197})
      CHECK(std::abs(field_mass(g, px.kernel_field(i), x0) - 1.0) < 2.5e-3);

  // two-step composition matches the one-step kernel
  {
    KernelAlgebra alg(g);
    std::vector<double> out(mat_size(g), 0.0);
    alg.compose(px.kernel_field(ih).data(), px.kernel_field(ih).data(), 1.0, out.data());
    CHECK(sup_diff(out, px.kernel_field(iT)) < 2e-3 * sup_abs(px.kernel_field(iT)));
  }

  // no mass sinks below the discretization noise
  double neg = 0;
  for (double v : px.kernel_field(iT)) neg = std::min(neg, v);
  CHECK(neg > -1e-9 * sp);

  // time derivative against the true generator, column by column
  {
    RingOperator op(g, prof, coef, Compensation::symmetric);
    int im = px.node(0.294), ip = px.node(0.306);
    double dt = px.times()[std::size_t(ip)] - px.times()[std::size_t(im)];
    for (int y : {64, 128, 192}) {
      std::vector<double> col(std::size_t(g.n)), lcol(std::size_t(g.n));
      for (int x = 0; x < g.n; ++x) col[std::size_t(x)] = px.kernel_at(ih, x, y);
      op.apply_field(col, lcol);
      double worst = 0, scale = 0;
      for (int x = 0; x < g.n; ++x) {
        double dpdt = (px.kernel_at(ip, x, y) - px.kernel_at(im, x, y)) / dt;
        worst = std::max(worst, std::abs(dpdt - lcol[std::size_t(x)]));
        scale = std::max(scale, std::abs(dpdt));
      }
      CHECK(worst < 1.2e-2 * scale);
    }
  }
}

TEST_CASE("two-dimensional kernel passes the same structural checks") {
  SpaceGrid g(2, 32, 6.0);
  LevyProfile prof = make_stable(2, 1.4);
  CoefficientField coef = CoefficientField::cosine(0.45, 0.12, pi / g.L, 0.08, 3.0, g.L);
  ParametrixParams prm;
  prm.t_final = 0.8;
  prm.nodes = 12;
  prm.grading = 1.4;
  prm.anchors = {0.4};
  Parametrix px(g, prof, Compensation::symmetric, coef, prm);

  int iT = int(px.times().size()) - 1;
  int ih = px.node(0.4);

  for (int i = 1; i <= iT; ++i) CHECK(px.picard_gap(i) <= prm.picard_tol);

  double sp = sup_abs(px.kernel_field(iT));
  CHECK(sup_abs(px.phi_field(iT)) > 0.01 * sp);
  CHECK(sup_abs(px.phi_field(iT)) < 0.3 * sp);

  for (int x0 : {0, 11, 16, 27})
    CHECK(std::abs(field_mass(g, px.kernel_field(iT), x0) - 1.0) < 1.3e-2);

  {
    KernelAlgebra alg(g);
    std::vector<double> out(mat_size(g), 0.0);
    alg.compose(px.kernel_field(ih).data(), px.kernel_field(ih).data(), 1.0, out.data());
    CHECK(sup_diff(out, px.kernel_field(iT)) < 1e-2 * sup_abs(px.kernel_field(iT)));
  }

  double neg = 0;
  for (double v : px.kernel_field(iT)) neg = std::min(neg, v);
  CHECK(neg > -1e-9 * sp);
}
