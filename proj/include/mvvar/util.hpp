#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace mvvar {

/// Formats a double with 12 significant digits, the fixed precision used by
/// every text output of the library.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Rounds a double to 12 significant decimal digits (parse of fmt12). Applied
/// to values before JSON serialization so files carry the same precision as
/// the CSV outputs.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt12(v).c_str(), nullptr);
}

/// Renders a grid coordinate as a small fraction when it is one ("1/4",
/// "2/3"), otherwise as a plain decimal. Used for strategy labels.
inline std::string format_grid_coord(double v) {
  for (int q = 1; q <= 12; ++q) {
    double scaled = v * q;
    double p = std::round(scaled);
    if (std::abs(scaled - p) < 1e-12 * q && p >= 0) {
      long pi = static_cast<long>(p);
      if (q == 1) return std::to_string(pi);
      // reduce the fraction
      long a = pi, b = q;
      while (b != 0) {
        long t = a % b;
        a = b;
        b = t;
      }
      long g = a == 0 ? 1 : a;
      long num = pi / g, den = q / g;
      if (den == 1) return std::to_string(num);
      return std::to_string(num) + "/" + std::to_string(den);
    }
  }
  return fmt12(v);
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Tasks must be
/// independent; results must be written to disjoint slots. The first
/// exception (by lowest index) is rethrown after all threads join, so the
/// observable outcome does not depend on thread scheduling.
inline void parallel_for_indexed(std::size_t count, int workers,
                                 const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  int nthreads = workers < 1 ? 1 : workers;
  if (static_cast<std::size_t>(nthreads) > count)
    nthreads = static_cast<int>(count);
  if (nthreads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace mvvar
