#pragma once

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "levyheat/coefficient.hpp"
#include "levyheat/fft.hpp"
#include "levyheat/frozen.hpp"
#include "levyheat/grid.hpp"
#include "levyheat/profile.hpp"
#include "levyheat/quadrature.hpp"
#include "levyheat/symbol.hpp"
#include "levyheat/util.hpp"

namespace levyheat {

// Variable-coefficient kernel built perturbatively around the frozen family.
// With p0(t,x,w) = p^{(w)}(t, x−w) the frozen kernel (frozen.hpp) and
//   q0(t,x,w) = Σ_m (a_m(x) − a_m(w)) · (L_m p^{(w)})(t, x−w)
// its defect under the true generator, the kernel is
//   p = p0 + p0 ⊛ q,   q = q0 + q0 ⊛ q,
//   (f ⊛ g)(t,x,y) = ∫_0^t ds ∫ f(t−s,x,w) g(s,w,y) dw.
// Everything below discretizes ⊛: two-point kernels live as dense lattice
// matrices on a graded time ladder, the w-integral is a lattice contraction,
// and the s-integral is product-integrated panel by panel with the
// near-endpoint transients resolved on a logarithmic evaluation cache that
// carries the analytic u→0 limit of each kernel family.

// ---------------------------------------------------------------------------
// Dense two-point kernels and their composition.
//
// d=1: F[x·n + w], plain n×n matrices, (F∘G)[x,y] = dx·Σ_w F[x,w]G[w,y].
// d=2: coefficients vary along axis 0 only, so kernels collapse to
//      F[(x0·n + w0)·n + j1] with j1 ↔ x1−w1 in FFT-natural order; the
//      transverse displacement convolves under ∘ and is handled spectrally.
// ---------------------------------------------------------------------------
class KernelAlgebra {
 public:
  explicit KernelAlgebra(const SpaceGrid& g) : g_(g) {
    if (g_.d == 2) {
      std::size_t n = g_.axis();
      fft_ = std::make_unique<Fft>(1, g_.n);
      fa_.resize(n * n * n);
      ga_.resize(n * n * n);
      ca_.resize(n * n * n);
      line_.resize(n);
    }
  }

  std::size_t field_size() const {
    std::size_t n = g_.axis();
    return g_.d == 1 ? n * n : n * n * n;
  }

  // out += scale · (F ∘ G); a vanishing operand short-circuits, which keeps
  // degenerate sweeps (identically zero defect) free of dead matmuls.
  void compose(const double* f, const double* g, double scale, double* out) {
    std::size_t sz = field_size();
    auto all_zero = [sz](const double* a) {
      for (std::size_t j = 0; j < sz; ++j)
        if (a[j] != 0.0) return false;
      return true;
    };
    if (scale == 0.0 || all_zero(f) || all_zero(g)) return;
    int n = g_.n;
    if (g_.d == 1) {
      cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, n, n, n, scale * g_.dx(), f, n, g,
                  n, 1.0, out, n);
      return;
    }
    std::size_t nn = g_.axis(), n2 = nn * nn;
    auto spectra = [&](const double* src, std::vector<std::complex<double>>& dst) {
      for (std::size_t r = 0; r < n2; ++r) {
        const double* row = src + r * nn;
        for (std::size_t j = 0; j < nn; ++j) line_[j] = row[j];
        fft_->forward(line_.data());
        for (std::size_t k = 0; k < nn; ++k) dst[k * n2 + r] = line_[k];
      }
    };
    spectra(f, fa_);
    spectra(g, ga_);
    const std::complex<double> one(1.0), zero(0.0);
    for (std::size_t k = 0; k < nn; ++k) {
      cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, g_.n, g_.n, g_.n, &one,
                  fa_.data() + k * n2, g_.n, ga_.data() + k * n2, g_.n, &zero,
                  ca_.data() + k * n2, g_.n);
    }
    double c0 = scale * g_.dx() * g_.dx() / double(nn);
    for (std::size_t r = 0; r < n2; ++r) {
      for (std::size_t k = 0; k < nn; ++k) line_[k] = ca_[k * n2 + r];
      fft_->backward(line_.data());
      double* row = out + r * nn;
      for (std::size_t j = 0; j < nn; ++j) row[j] += c0 * line_[j].real();
    }
  }

 private:
  SpaceGrid g_;
  std::unique_ptr<Fft> fft_;
  std::vector<std::complex<double>> fa_, ga_, ca_, line_;
};

// ---------------------------------------------------------------------------
// One kernel family u ↦ F(u) on a logarithmic time ladder. Evaluation is
// cubic in log u between ladder nodes; below the bottom node the family is
// linear in u between the attached analytic u→0 limit and the bottom node,
// which is the leading small-time behavior of every family cached here.
// ---------------------------------------------------------------------------
// Fields are held single-precision: at acceptance resolutions the two caches
// would otherwise dominate memory, and a 1e-7 relative perturbation of the
// panel integrands is orders below every residual bar.
class TimeCache {
 public:
  void set_limit(const std::vector<double>& f0) { f0_.assign(f0.begin(), f0.end()); }
  void push(double u, const std::vector<double>& f) {
    require_numeric(us_.empty() || u > us_.back(), "cache ladder must ascend");
    lus_.push_back(std::log(u));
    us_.push_back(u);
    fs_.emplace_back(f.begin(), f.end());
  }
  double bottom() const { return us_.front(); }
  double top() const { return us_.back(); }

  void eval(double u, double* out) const {
    std::size_t S = fs_.front().size();
    if (u >= us_.back()) {
      require_numeric(u <= us_.back() * (1 + 1e-9), "cache queried beyond its top node");
      const float* a = fs_.back().data();
      for (std::size_t j = 0; j < S; ++j) out[j] = a[j];
      return;
    }
    if (u <= us_.front()) {
      const float* f1 = fs_.front().data();
      if (f0_.empty()) {
        for (std::size_t j = 0; j < S; ++j) out[j] = f1[j];
        return;
      }
      double lam = u / us_.front();
      for (std::size_t j = 0; j < S; ++j) out[j] = f0_[j] + lam * (double(f1[j]) - f0_[j]);
      return;
    }
    double lu = std::log(u);
    std::size_t i = stencil4_start(lus_, lu);
    std::array<double, 4> xs{lus_[i], lus_[i + 1], lus_[i + 2], lus_[i + 3]};
    auto w = lagrange4(xs, lu);
    const float* a = fs_[i].data();
    const float* b = fs_[i + 1].data();
    const float* c = fs_[i + 2].data();
    const float* d = fs_[i + 3].data();
    for (std::size_t j = 0; j < S; ++j)
      out[j] = w[0] * a[j] + w[1] * b[j] + w[2] * c[j] + w[3] * d[j];
  }

 private:
  std::vector<double> us_, lus_, f0_;
  std::vector<std::vector<float>> fs_;
};

// ---------------------------------------------------------------------------
// The marched construction.
// ---------------------------------------------------------------------------
struct ParametrixParams {
  double t_final = 1.0;
  int nodes = 24;               // graded ladder size
  double grading = 2.0;         // node j at t_final·(j/nodes)^grading
  std::vector<double> anchors;  // extra times snapped into the ladder
  int gl_nodes = 4;             // Gauss order per panel
  int cache_per_decade = 12;    // evaluation-cache density
  double cache_floor = 2e-5;    // cache bottom relative to t_final
  int picard_max = 12;
  double picard_tol = 1e-9;     // implicit-node fixed-point gap
  double tol_alias = 1e-8;      // frozen-slice aliasing budget
  int ovs_cap = 0;              // 0: dimension default (64 / 16)
  bool detect_constant = true;  // skip the march when the defect vanishes
};

class Parametrix {
 public:
  Parametrix(const SpaceGrid& g, const LevyProfile& prof, Compensation comp,
             const CoefficientField& coef, ParametrixParams prm)
      : g_(g),
        prof_(prof),
        coef_(coef),
        prm_(std::move(prm)),
        alg_(g),
        fac_(g, prof, comp, coef, prm_.tol_alias,
             prm_.ovs_cap > 0 ? prm_.ovs_cap : (g.d == 1 ? 64 : 16)) {
    require_config(prm_.t_final > 0, "kernel construction needs t_final > 0");
    require_config(coef_.rank() <= 8, "coefficient rank capped at 8");
    t_ = graded_times(prm_.t_final, prm_.nodes, prm_.grading, prm_.anchors);
    build_tables();
    build_caches();
    march();
  }

  const SpaceGrid& grid() const { return g_; }
  const FrozenFactory& factory() const { return fac_; }
  const std::vector<double>& times() const { return t_; }
  double floor_time() const { return floor_time_; }

  // exact ladder lookup — construction times are the only admissible queries
  int node(double t) const {
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (std::abs(t_[i] - t) <= 1e-9 * std::max(t, t_[i])) return int(i);
    fail_numeric("requested time is not on the construction ladder");
  }

  // True when the coefficients are spatially constant and the construction
  // reduced exactly to the frozen kernel.
  bool degenerate() const { return trivial_; }

  const std::vector<double>& frozen_field(int i) const { return p0_[std::size_t(i)]; }
  const std::vector<double>& q_field(int i) const {
    require_numeric(!released_, "correction fields were released");
    return trivial_ ? zero_ : q_[std::size_t(i)];
  }
  const std::vector<double>& phi_field(int i) const {
    require_numeric(!released_, "correction fields were released");
    return trivial_ ? zero_ : phi_[std::size_t(i)];
  }
  const std::vector<double>& kernel_field(int i) const {
    return trivial_ ? p0_[std::size_t(i)] : p_[std::size_t(i)];
  }

  // p(t_i, x, y); d=2 positions are (x0, x1), (y0, y1)
  double kernel_at(int i, int x0, int y0, int x1 = 0, int y1 = 0) const {
    return kernel_field(i)[idx(x0, y0, x1, y1)];
  }
  std::size_t idx(int x0, int y0, int x1 = 0, int y1 = 0) const {
    std::size_t n = g_.axis();
    if (g_.d == 1) return std::size_t(x0) * n + y0;
    return (std::size_t(x0) * n + y0) * n + std::size_t(g_.wrap_index(x1 - y1));
  }

  int picard_steps(int i) const { return picard_steps_[std::size_t(i)]; }
  double picard_gap(int i) const { return picard_gap_[std::size_t(i)]; }

  // Drop the time caches and correction fields once construction-time
  // diagnostics are done; keeps p and p0 (the kernels) and the picard
  // telemetry.  Frees the bulk of the footprint before post-hoc analysis
  // runs that only read the kernel.
  void release_transients() {
    kc_ = TimeCache{};
    pc_ = TimeCache{};
    q_.clear();
    q_.shrink_to_fit();
    phi_.clear();
    phi_.shrink_to_fit();
    d1_.clear();
    d1_.shrink_to_fit();
    released_ = true;
  }

 private:
  // --- kernel matrices from one frozen slice set -------------------------
  void defect_matrix(const FrozenSlices& sl, double* out) const {
    int n = g_.n, rank = coef_.rank();
    if (g_.d == 1) {
      for (int x = 0; x < n; ++x)
        for (int w = 0; w < n; ++w) {
          double v = 0;
          for (int m = 0; m < rank; ++m)
            v += (av_[std::size_t(m) * n + x] - av_[std::size_t(m) * n + w]) *
                 sl.lm_at(m, w, x - w);
          out[std::size_t(x) * n + w] = v;
        }
      return;
    }
    for (int x0 = 0; x0 < n; ++x0)
      for (int w0 = 0; w0 < n; ++w0) {
        double* row = out + (std::size_t(x0) * n + w0) * n;
        std::array<double, 8> da{};
        for (int m = 0; m < rank; ++m)
          da[std::size_t(m)] = av_[std::size_t(m) * n + x0] - av_[std::size_t(m) * n + w0];
        for (int j1 = 0; j1 < n; ++j1) {
          double v = 0;
          for (int m = 0; m < rank; ++m) v += da[std::size_t(m)] * sl.lm_at(m, w0, x0 - w0, j1);
          row[j1] = v;
        }
      }
  }

  void frozen_matrix(const FrozenSlices& sl, double* out) const {
    int n = g_.n;
    if (g_.d == 1) {
      for (int x = 0; x < n; ++x)
        for (int w = 0; w < n; ++w) out[std::size_t(x) * n + w] = sl.p_at(w, x - w);
      return;
    }
    for (int x0 = 0; x0 < n; ++x0)
      for (int w0 = 0; w0 < n; ++w0) {
        double* row = out + (std::size_t(x0) * n + w0) * n;
        for (int j1 = 0; j1 < n; ++j1) row[j1] = sl.p_at(w0, x0 - w0, j1);
      }
  }

  // u→0 limit of the defect on the lattice: off the diagonal the frozen rows
  // converge to the bare jump kernel, and the coefficient increment vanishes
  // at x=w, so the limit is the (periodized) increment-weighted jump density.
  void limit_defect(std::vector<double>& out) const {
    int n = g_.n, rank = coef_.rank();
    out.assign(alg_.field_size(), 0.0);
    auto basis = [&](int m, double r) {
      double zk = coef_.zk(m);
      return zk == 0 ? 1.0 : std::cos(zk * r);
    };
    if (g_.d == 1) {
      for (int x = 0; x < n; ++x)
        for (int w = 0; w < n; ++w) {
          if (x == w) continue;
          double v = g_.wrap(g_.coord(x) - g_.coord(w));
          double acc = 0;
          for (int img = -4; img <= 4; ++img) {
            double z = v + 2 * g_.L * img;
            if (z == 0) continue;
            double jd = prof_.j_density({z, 0.0});
            for (int m = 0; m < rank; ++m)
              acc += (av_[std::size_t(m) * n + x] - av_[std::size_t(m) * n + w]) *
                     basis(m, std::abs(z)) * jd;
          }
          out[std::size_t(x) * n + w] = acc;
        }
      return;
    }
    for (int x0 = 0; x0 < n; ++x0)
      for (int w0 = 0; w0 < n; ++w0) {
        double* row = out.data() + (std::size_t(x0) * n + w0) * n;
        std::array<double, 8> da{};
        for (int m = 0; m < rank; ++m)
          da[std::size_t(m)] = av_[std::size_t(m) * n + x0] - av_[std::size_t(m) * n + w0];
        double v0 = g_.wrap(g_.coord(x0) - g_.coord(w0));
        for (int j1 = 0; j1 < n; ++j1) {
          double v1 = g_.wrap(j1 * g_.dx());
          double acc = 0;
          for (int i0 = -2; i0 <= 2; ++i0)
            for (int i1 = -2; i1 <= 2; ++i1) {
              std::array<double, 2> z{v0 + 2 * g_.L * i0, v1 + 2 * g_.L * i1};
              double r = std::hypot(z[0], z[1]);
              if (r == 0) continue;
              double jd = prof_.j_density(z);
              for (int m = 0; m < rank; ++m) acc += da[std::size_t(m)] * basis(m, r) * jd;
            }
          row[j1] = acc;
        }
      }
  }

  void build_tables() {
    int n = g_.n, rank = coef_.rank();
    av_.resize(std::size_t(rank) * n);
    for (int m = 0; m < rank; ++m)
      for (int i = 0; i < n; ++i) av_[std::size_t(m) * n + i] = coef_.a(m, g_.coord(i));
    if (prm_.detect_constant) {
      trivial_ = true;
      for (int m = 0; m < rank && trivial_; ++m)
        for (int i = 1; i < n; ++i)
          if (av_[std::size_t(m) * n + i] != av_[std::size_t(m) * n]) {
            trivial_ = false;
            break;
          }
    }
  }

  void build_caches() {
    double T = t_.back();
    double u0 = std::max(prm_.cache_floor * T, fac_.time_floor() * 1.05);
    floor_time_ = u0;
    if (trivial_) return;  // a vanishing defect never consults the caches
    require_config(u0 < T / 4, "cache ladder needs the aliasing floor well below t_final");
    require_config(t_.front() >= u0,
                   "first ladder node sits below the frozen evaluation floor "
                   "(soften the grading or enlarge the lattice)");
    int count = std::max(4, int(std::ceil(std::log10(T / u0) * prm_.cache_per_decade)) + 1);
    double dl = std::log(T / u0) / (count - 1);
    for (int k = 0; k < count; ++k) {
      double u = k + 1 == count ? T : u0 * std::exp(k * dl);
      FrozenSlices sl = fac_.slices(u);
      std::vector<double> kf(alg_.field_size()), pf(alg_.field_size());
      defect_matrix(sl, kf.data());
      frozen_matrix(sl, pf.data());
      kc_.push(u, std::move(kf));
      pc_.push(u, std::move(pf));
    }
    std::vector<double> lim;
    limit_defect(lim);
    kc_.set_limit(std::move(lim));
    lim.assign(alg_.field_size(), 0.0);
    int n = g_.n;
    double w = 1.0 / g_.cell();
    if (g_.d == 1)
      for (int x = 0; x < n; ++x) lim[std::size_t(x) * n + x] = w;
    else
      for (int x0 = 0; x0 < n; ++x0) lim[(std::size_t(x0) * n + x0) * n] = w;
    pc_.set_limit(std::move(lim));
  }

  // --- panel machinery ----------------------------------------------------
  // Sub-panel edges of [0, len] descending geometrically toward 0.
  std::vector<double> geometric_edges(double len) const {
    double stop = std::max(0.5 * kc_.bottom(), len * std::pow(2.0, -20));
    std::vector<double> e{len};
    double v = len;
    while (v > 1.5 * stop) {
      v *= 0.5;
      e.push_back(v);
    }
    e.push_back(0.0);
    return e;
  }

  // kl += ∫_a^b c(ti−s)·λ_l(s) ds and kr likewise, where λ are the linear
  // hats of the parent panel [pa, pb] ⊇ [a, b].
  void hat_panel(const TimeCache& c, double ti, double a, double b, double pa, double pb,
                 std::vector<double>& kl, std::vector<double>& kr, std::vector<double>& tmp) {
    const GlRule& r = gl_rule(prm_.gl_nodes);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int gq = 0; gq < prm_.gl_nodes; ++gq) {
      double s = mid + half * r.x[std::size_t(gq)];
      double wq = half * r.w[std::size_t(gq)];
      double lr = (s - pa) / (pb - pa);
      c.eval(ti - s, tmp.data());
      double cl = wq * (1 - lr), cr = wq * lr;
      for (std::size_t j = 0; j < tmp.size(); ++j) {
        kl[j] += cl * tmp[j];
        kr[j] += cr * tmp[j];
      }
    }
  }

  // First ladder panel [0, t_0]: the integrand's g-side follows the defect
  // family (q ≈ q0 there) plus a linear ramp to the marched node value. The
  // outer kernel is linearized across the panel — its argument stays near ti.
  void first_panel(const TimeCache& outer, double ti, const std::vector<double>& d1,
                   double* acc) {
    double t0 = t_.front();
    std::size_t S = alg_.field_size();
    std::vector<double> gl(S, 0.0), gr(S, 0.0), tmp(S), k0(S), k1(S);
    const GlRule& r = gl_rule(prm_.gl_nodes);
    std::vector<double> edges = geometric_edges(t0);  // descending toward 0
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      double b = edges[e], a = edges[e + 1];
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int gq = 0; gq < prm_.gl_nodes; ++gq) {
        double s = mid + half * r.x[std::size_t(gq)];
        double wq = half * r.w[std::size_t(gq)];
        kc_.eval(s, tmp.data());
        double lr = s / t0;
        double cl = wq * (1 - lr), cr = wq * lr;
        for (std::size_t j = 0; j < S; ++j) {
          gl[j] += cl * tmp[j];
          gr[j] += cr * tmp[j];
        }
      }
    }
    // ∫ λ·(s/t0) ds folds the ramp-to-node correction into the g kernels
    for (std::size_t j = 0; j < S; ++j) {
      gl[j] += (t0 / 6) * d1[j];
      gr[j] += (t0 / 3) * d1[j];
    }
    outer.eval(ti, k0.data());
    outer.eval(ti - t0, k1.data());
    alg_.compose(k0.data(), gl.data(), 1.0, acc);
    alg_.compose(k1.data(), gr.data(), 1.0, acc);
  }

  // Smallest node: both sides of the composition follow their caches.
  void seed_node(const TimeCache& outer, double* acc) {
    double t0 = t_.front();
    std::size_t S = alg_.field_size();
    std::vector<double> ko(S), gi(S);
    const GlRule& r = gl_rule(2);
    std::vector<double> edges = geometric_edges(0.5 * t0);
    auto add = [&](double a, double b, bool mirror) {
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int gq = 0; gq < 2; ++gq) {
        double s = mid + half * r.x[std::size_t(gq)];
        if (mirror) s = t0 - s;
        double wq = half * r.w[std::size_t(gq)];
        outer.eval(t0 - s, ko.data());
        kc_.eval(s, gi.data());
        alg_.compose(ko.data(), gi.data(), wq, acc);
      }
    };
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      add(edges[e + 1], edges[e], false);  // s side: transient toward 0
      add(edges[e + 1], edges[e], true);   // outer side: transient toward t0
    }
  }

  // One Volterra sweep over the ladder. solve=true marches the fixed-point
  // family itself (g = out, implicit last node); solve=false integrates the
  // already-marched q against `outer` (g = q_).
  void sweep(const TimeCache& outer, bool solve, std::vector<std::vector<double>>& out) {
    std::size_t M = t_.size(), S = alg_.field_size();
    std::vector<double> acc(S), kl(S), kr(S), tmp(S), next(S);
    const std::vector<std::vector<double>>& gsrc = solve ? out : q_;
    for (std::size_t i = 0; i < M; ++i) {
      double ti = t_[i];
      if (solve)
        acc = out[i];  // preloaded with the exact defect at the node
      else
        std::fill(acc.begin(), acc.end(), 0.0);
      if (i == 0) {
        std::vector<double> rhs0 = out[0];
        seed_node(outer, acc.data());
        out[0] = acc;
        if (solve)  // ramp correction used by every later first panel
          for (std::size_t j = 0; j < S; ++j) d1_[j] = out[0][j] - rhs0[j];
        continue;
      }
      first_panel(outer, ti, d1_, acc.data());
      // interior panels: hat product-integration, one composition per node
      std::fill(kr.begin(), kr.end(), 0.0);
      for (std::size_t jp = 1; jp + 1 < i + 1; ++jp) {
        std::fill(kl.begin(), kl.end(), 0.0);
        std::swap(kl, kr);  // pending right-hat of the previous panel
        std::fill(kr.begin(), kr.end(), 0.0);
        hat_panel(outer, ti, t_[jp - 1], t_[jp], t_[jp - 1], t_[jp], kl, kr, tmp);
        alg_.compose(kl.data(), gsrc[jp - 1].data(), 1.0, acc.data());
      }
      // last panel [t_{i−1}, ti]: geometric refinement toward s = ti where
      // the outer kernel passes through its small-time transient
      std::swap(kl, kr);
      std::fill(kr.begin(), kr.end(), 0.0);
      double delta = ti - t_[i - 1];
      std::vector<double> edges = geometric_edges(delta);
      for (std::size_t e = 0; e + 1 < edges.size(); ++e)
        hat_panel(outer, ti, ti - edges[e], ti - edges[e + 1], t_[i - 1], ti, kl, kr, tmp);
      alg_.compose(kl.data(), gsrc[i - 1].data(), 1.0, acc.data());
      if (!solve) {
        alg_.compose(kr.data(), gsrc[i].data(), 1.0, acc.data());
        out[i] = acc;
        continue;
      }
      // implicit node value: small contraction, Picard iteration
      std::vector<double>& guess = out[i];  // starts at the defect; warm-start
      guess = out[i - 1];
      int it = 0;
      double gap = 0;
      for (it = 0; it < prm_.picard_max; ++it) {
        next = acc;
        alg_.compose(kr.data(), guess.data(), 1.0, next.data());
        gap = rel_gap(next, guess);
        std::swap(guess, next);
        if (gap <= prm_.picard_tol) break;
      }
      picard_steps_[i] = it + 1;
      picard_gap_[i] = gap;
    }
  }

  static double rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, den = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      num = std::max(num, std::abs(a[j] - b[j]));
      den = std::max(den, std::abs(a[j]));
    }
    return den > 0 ? num / den : 0.0;
  }

  void march() {
    std::size_t M = t_.size(), S = alg_.field_size();
    picard_steps_.assign(M, 0);
    picard_gap_.assign(M, 0.0);
    p0_.assign(M, std::vector<double>(S));
    if (trivial_) {  // constant coefficients: the defect is identically zero
      zero_.assign(S, 0.0);
      for (std::size_t i = 0; i < M; ++i) frozen_matrix(fac_.slices(t_[i], false), p0_[i].data());
      return;
    }
    q_.assign(M, std::vector<double>(S));
    phi_.assign(M, std::vector<double>(S, 0.0));
    p_.assign(M, std::vector<double>(S));
    d1_.assign(S, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      FrozenSlices sl = fac_.slices(t_[i]);
      frozen_matrix(sl, p0_[i].data());
      defect_matrix(sl, q_[i].data());  // sweep rhs; overwritten by the march
    }
    sweep(kc_, true, q_);
    sweep(pc_, false, phi_);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < S; ++j) p_[i][j] = p0_[i][j] + phi_[i][j];
  }

  SpaceGrid g_;
  LevyProfile prof_;
  CoefficientField coef_;
  ParametrixParams prm_;
  KernelAlgebra alg_;
  FrozenFactory fac_;
  std::vector<double> t_, av_, d1_, zero_;
  TimeCache kc_, pc_;
  double floor_time_ = 0;
  bool trivial_ = false;
  bool released_ = false;
  std::vector<std::vector<double>> q_, p0_, phi_, p_;
  std::vector<int> picard_steps_;
  std::vector<double> picard_gap_;
};

}  // namespace levyheat
