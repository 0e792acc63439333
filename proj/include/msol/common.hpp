#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msol {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid input to a library operation (violated precondition).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity broke its stated bound.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration; carries the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Neumaier-compensated accumulator. Order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Fractional part in [0, 1).
inline double wrap01(double x) noexcept {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

/// Representative of x mod 1 in [-0.5, 0.5).
inline double wrap_centered(double x) noexcept { return x - std::floor(x + 0.5); }

/// Number of worker threads used by the parallel kernels (default 1).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Work items are independent; callers
/// write into per-index slots and reduce afterwards in index order, so the
/// result does not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace msol
