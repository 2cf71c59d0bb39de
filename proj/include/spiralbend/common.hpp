#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spiralbend {

using Vec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter out of the range where a formula is meaningful.
class InvalidParameter : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two code paths that must agree did not; always a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ScheduleTooShort : public std::out_of_range {
 public:
  explicit ScheduleTooShort(std::size_t needed)
      : std::out_of_range("radius schedule too short, needs " +
                          std::to_string(needed) + " radii"),
        needed_(needed) {}
  std::size_t needed() const { return needed_; }

 private:
  std::size_t needed_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Euclidean norm that survives squares overflowing or underflowing.
inline double norm2(const Vec& v) {
  const double n = v.norm();
  if (std::isfinite(n) && n > 1e-150) return n;
  return v.stableNorm();
}

// Thread cap: explicit setting, else SPIRALBEND_THREADS, else hardware.
inline unsigned& thread_override() {
  static unsigned value = 0;
  return value;
}

inline void set_thread_count(unsigned n) { thread_override() = n; }

inline unsigned thread_count() {
  if (thread_override() > 0) return thread_override();
  if (const char* env = std::getenv("SPIRALBEND_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs fn(begin, end) on contiguous chunks. Chunk boundaries depend only on
// n and the chunk count, results are gathered per chunk and merged by the
// caller in chunk order, so outputs do not depend on scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  const std::size_t t =
      std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (t == 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t c = 0; c < t; ++c) {
    const std::size_t b = n * c / t, e = n * (c + 1) / t;
    pool.emplace_back([&, b, e, c] {
      try {
        fn(b, e, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

// Min/max tracker with index tie-breaks so merges are order independent.
struct Extremum {
  double value;
  std::size_t index = std::numeric_limits<std::size_t>::max();

  bool better_min(double v, std::size_t i) const {
    return v < value || (v == value && i < index);
  }
  bool better_max(double v, std::size_t i) const {
    return v > value || (v == value && i < index);
  }
};

inline Extremum min_start() { return {kInf}; }
inline Extremum max_start() { return {-kInf}; }

}  // namespace spiralbend
