#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace vocatree {

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure mode the library reports maps onto one of
// these; the CLI turns ConfigError into exit code 2 and everything else
// into exit code 1.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct DuplicateError : ValidationError { using ValidationError::ValidationError; };
struct UnsupportedFormatError : Error { using Error::Error; };
struct CorruptFileError : Error { using Error::Error; };
struct EmptyInputError : Error { using Error::Error; };
struct TooShortError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct SingleClassError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct NoInputError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Binary label. +1 is healthy, -1 is depressed; depressed is the
// screening-positive class, so sensitivity counts correctly flagged
// depressed subjects. Ties anywhere in the pipeline resolve to depressed.
// ---------------------------------------------------------------------------

enum class Label : int { healthy = +1, depressed = -1 };

inline int label_sign(Label l) { return static_cast<int>(l); }

inline Label label_from_sign(int s) {
  return s > 0 ? Label::healthy : Label::depressed;
}

inline std::string label_name(Label l) {
  return l == Label::healthy ? "healthy" : "depressed";
}

inline Label parse_label(const std::string& s) {
  if (s == "healthy") return Label::healthy;
  if (s == "depressed") return Label::depressed;
  throw ValidationError("unknown label token: '" + s + "'");
}

enum class Gender { male, female };

inline std::string gender_name(Gender g) {
  return g == Gender::male ? "male" : "female";
}

inline Gender parse_gender(const std::string& s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  throw ValidationError("unknown gender token: '" + s + "'");
}

// ---------------------------------------------------------------------------
// Canonical number formatting. Reports are byte-identical across runs, so
// every number printed anywhere goes through one of these.
// ---------------------------------------------------------------------------

/// Shortest fixed form with the given significant digits (printf %g, no
/// exponent surprises for the magnitudes used here).
inline std::string format_significant(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

/// Fraction in [0, 1] rendered as a percentage with one decimal.
inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

/// Percentage with one decimal as a number (for JSON fields).
inline double percent_1dp(double fraction) {
  return std::round(fraction * 1000.0) / 10.0;
}

/// Round to the given significant digits (for JSON fields).
inline double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
  return std::round(v * mag) / mag;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. All randomness in the toolkit flows through Rng so
// results are reproducible bit-for-bit from a single seed, independent of
// platform library distributions and of how work is scheduled. Derived
// seeds come from mix_seed so parallel units never share a stream.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_seed(mix_seed(a, b), static_cast<std::uint64_t>(rest)...);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Modulo bias is negligible for n << 2^64.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
  }

  /// Standard normal via Box-Muller; spelled out so the draw sequence is
  /// pinned by this code, not by a library's distribution internals.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Worker parallelism. VOCATREE_THREADS caps the pool (0 or unset = auto).
// parallel_for_indexed assigns each index to exactly one worker and the
// caller aggregates slot results in index order, so output is identical
// for every thread count.
// ---------------------------------------------------------------------------

inline unsigned worker_thread_count() {
  if (const char* env = std::getenv("VOCATREE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

template <typename Fn>
void parallel_for_indexed(std::size_t n, Fn&& fn) {
  const unsigned threads = std::min<std::size_t>(worker_thread_count(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vocatree
