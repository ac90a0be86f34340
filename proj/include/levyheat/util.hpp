#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace levyheat {

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double sqr(double x) { return x * x; }

// Error taxonomy maps onto the CLI exit codes: config -> 2, numeric -> 3.
// Check failures are not exceptions; they travel through reports.
enum class ErrKind { config, numeric };

struct Error : std::runtime_error {
  ErrKind kind;
  Error(ErrKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

[[noreturn]] inline void fail_config(const std::string& what) { throw Error(ErrKind::config, what); }
[[noreturn]] inline void fail_numeric(const std::string& what) { throw Error(ErrKind::numeric, what); }

inline void require_config(bool ok, const std::string& what) {
  if (!ok) fail_config(what);
}
inline void require_numeric(bool ok, const std::string& what) {
  if (!ok) fail_numeric(what);
}

// ---------------------------------------------------------------------------
// Threading. Work is split into a fixed chunk grid regardless of the thread
// count, and reductions sum per-chunk partials in chunk order, so results are
// bit-identical for any --threads value.
// ---------------------------------------------------------------------------

inline int& thread_count() {
  static int n = 1;
  return n;
}

inline void set_thread_count(int n) {
  thread_count() = n > 0 ? n : int(std::thread::hardware_concurrency() ? std::thread::hardware_concurrency() : 1);
}

inline constexpr std::size_t chunk_grid = 64;

// body(begin, end, chunk_id) over [0, n) split into at most chunk_grid ranges.
template <class Body>
void parallel_chunks(std::size_t n, Body&& body) {
  if (n == 0) return;
  std::size_t chunks = std::min<std::size_t>(chunk_grid, n);
  std::size_t per = (n + chunks - 1) / chunks;
  int nt = std::min<std::size_t>(thread_count(), chunks);
  if (nt <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t b = c * per, e = std::min(n, b + per);
      if (b < e) body(b, e, c);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::vector<std::size_t> next(1, 0);
  // static cyclic assignment chunk -> thread keeps scheduling deterministic
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t c = t; c < chunks; c += std::size_t(nt)) {
        std::size_t b = c * per, e = std::min(n, b + per);
        if (b < e) body(b, e, c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// Deterministic parallel reduction: partials indexed by chunk, summed in order.
template <class Fn>
double parallel_sum(std::size_t n, Fn&& term) {
  std::array<double, chunk_grid> partial{};
  parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t c) {
    double s = 0;
    for (std::size_t i = b; i < e; ++i) s += term(i);
    partial[c] = s;
  });
  double s = 0;
  std::size_t chunks = std::min<std::size_t>(chunk_grid, n);
  for (std::size_t c = 0; c < chunks; ++c) s += partial[c];
  return s;
}

// ---------------------------------------------------------------------------
// Seeded randomness. Deviates come from explicit bit manipulation of a
// SplitMix64-seeded xorshift so streams do not depend on the standard
// library's distribution implementations.
// ---------------------------------------------------------------------------

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    s = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    for (int i = 0; i < 4; ++i) next();
  }
  std::uint64_t next() {
    // splitmix64 step
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

// Stable stream id from a name, also used to fingerprint configs.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Shortest round-trip decimal for doubles; stable across runs.
inline std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Small dense interpolation helpers.
// ---------------------------------------------------------------------------

// Cubic Lagrange weights for target x against nodes x0..x3 (distinct).
inline std::array<double, 4> lagrange4(const std::array<double, 4>& xs, double x) {
  std::array<double, 4> w;
  for (int i = 0; i < 4; ++i) {
    double p = 1;
    for (int j = 0; j < 4; ++j)
      if (j != i) p *= (x - xs[j]) / (xs[i] - xs[j]);
    w[i] = p;
  }
  return w;
}

// Index of the first node of a centered 4-point stencil in a sorted grid.
inline std::size_t stencil4_start(const std::vector<double>& grid, double x) {
  std::size_t n = grid.size();
  if (n < 4) fail_numeric("interpolation grid needs at least 4 nodes");
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (grid[mid] <= x ? lo : hi) = mid;
  }
  std::size_t s = lo >= 1 ? lo - 1 : 0;
  return std::min(s, n - 4);
}

}  // namespace levyheat
