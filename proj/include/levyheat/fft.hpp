#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "levyheat/grid.hpp"
#include "levyheat/util.hpp"

namespace levyheat {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// One c2c transform size (length n in d=1, n×n in d=2), both directions.
// Planned with FFTW_ESTIMATE|FFTW_UNALIGNED: deterministic plans that execute
// on any caller buffer. Planning is serialized (the FFTW planner is not
// thread-safe); execution is concurrent-safe.
class Fft {
 public:
  Fft(int d, int n) : d_(d), n_(n) {
    std::vector<std::complex<double>> tmp(size());
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = d == 1 ? fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, flags)
                  : fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
    bwd_ = d == 1 ? fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, flags)
                  : fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
    require_numeric(fwd_ != nullptr && bwd_ != nullptr, "FFTW plan creation failed");
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return d_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_; }
  // unnormalized e^{-i..} / e^{+i..} sums, in place
  void forward(std::complex<double>* a) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(a), reinterpret_cast<fftw_complex*>(a));
  }
  void backward(std::complex<double>* a) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(a), reinterpret_cast<fftw_complex*>(a));
  }

 private:
  int d_, n_;
  fftw_plan fwd_, bwd_;
};

inline const Fft& fft_plan(int d, int n) {
  static std::map<std::pair<int, int>, std::unique_ptr<Fft>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{d, n}];
  if (!slot) slot = std::make_unique<Fft>(d, n);
  return *slot;
}

// Centered-lattice Fourier pair in continuum normalization:
//   P̂(ξ_k) = Δx^d Σ_i p(x_i) e^{-i ξ_k·x_i},   p(x_i) = (2L)^{-d} Σ_k P̂(ξ_k) e^{+i ξ_k·x_i}
// with x_i = -L + iΔx and ξ_k the FFT-ordered lattice. The shift to the
// centered origin is the (-1)^k / (-1)^i twiddle.

inline std::vector<std::complex<double>> spectrum_of(const SpaceGrid& g, const double* p) {
  std::vector<std::complex<double>> a(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = p[i];
  fft_plan(g.d, g.n).forward(a.data());
  double scale = g.cell();
  if (g.d == 1) {
    for (int k = 0; k < g.n; ++k) a[k] *= (k & 1 ? -scale : scale);
  } else {
    for (int k0 = 0; k0 < g.n; ++k0)
      for (int k1 = 0; k1 < g.n; ++k1) a[g.id(k0, k1)] *= ((k0 + k1) & 1 ? -scale : scale);
  }
  return a;
}

// Inverse of spectrum_of. Destroys `spec`. Returns the largest |imaginary
// part| seen (a numerical-noise diagnostic; the caller owns the threshold).
inline double field_of(const SpaceGrid& g, std::vector<std::complex<double>>& spec, double* out) {
  if (g.d == 1) {
    for (int k = 1; k < g.n; k += 2) spec[k] = -spec[k];
  } else {
    for (int k0 = 0; k0 < g.n; ++k0)
      for (int k1 = 0; k1 < g.n; ++k1)
        if ((k0 + k1) & 1) spec[g.id(k0, k1)] = -spec[g.id(k0, k1)];
  }
  fft_plan(g.d, g.n).backward(spec.data());
  double norm = 1.0 / (g.d == 1 ? 2 * g.L : 4 * g.L * g.L);
  double imag = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = spec[i].real() * norm;
    imag = std::max(imag, std::abs(spec[i].imag()) * norm);
  }
  return imag;
}

}  // namespace levyheat
