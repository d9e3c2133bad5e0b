#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace liporos {

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto process exit codes:
//   input_error -> 2, check_error -> 3, numeric_error / internal_error -> 4.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed files, violated preconditions.
struct input_error : error {
  using error::error;
};

/// A pinned mathematical assertion failed on real data (e.g. the 45-ratio).
struct check_error : error {
  using error::error;
};

/// A numeric routine failed to converge; carries the final residual.
struct numeric_error : error {
  double residual;
  numeric_error(const std::string& what, double res) : error(what), residual(res) {}
};

/// Two routes that must agree disagreed, or an impossible state was reached.
struct internal_error : error {
  using error::error;
};

// ---------------------------------------------------------------------------
// Points and balls.
// ---------------------------------------------------------------------------

/// Coordinates of an ambient point. Length n for R^n, length 3 for H^1.
using Point = std::vector<double>;

struct Ball {
  Point center;
  double radius = 0.0;
};

inline void require_finite(std::span<const double> xs, const char* what) {
  for (double v : xs)
    if (!std::isfinite(v)) throw input_error(std::string(what) + ": non-finite coordinate");
}

// ---------------------------------------------------------------------------
// Deterministic random numbers. std::mt19937_64 is seeded directly and all
// distributions are derived from raw 53-bit draws so that identical seeds
// give identical streams on every platform and standard library.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0,1).
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Log-uniform in [a,b], a,b > 0.
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

  /// Box-Muller normal deviate.
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * double(n)) % n; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// `count` distinct indices out of [0,n), deterministic under the rng state
/// (partial Fisher-Yates). count is clamped to n.
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  if (count > n) count = n;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.index(n - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  return ids;
}

// ---------------------------------------------------------------------------
// Worker pool size. LIPOROS_THREADS caps the number of workers; the default
// is 1 so runs are sequential unless explicitly widened. All parallel loops
// write results by index, so the output never depends on the worker count.
// ---------------------------------------------------------------------------

inline unsigned worker_count() {
  const char* env = std::getenv("LIPOROS_THREADS");
  if (!env) return 1;
  long v = std::strtol(env, nullptr, 10);
  if (v < 1) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
}

/// Runs fn(i) for i in [0,n). Results must be written into caller-owned
/// storage indexed by i; chunks are split statically so the schedule is
/// reproducible. Exceptions from workers are rethrown on the caller.
template <class Fn>
void parallel_for_index(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// FNV-1a content hash for report provenance.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::span<const char> bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace liporos
