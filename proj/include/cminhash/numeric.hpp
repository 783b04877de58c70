#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cminhash {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

/// log(n!) for n in [0, size), accumulated in long double.
class LogFactorials {
 public:
  explicit LogFactorials(std::int64_t max_n) : table_(static_cast<std::size_t>(max_n) + 1) {
    long double acc = 0.0L;
    table_[0] = 0.0;
    for (std::int64_t n = 1; n <= max_n; ++n) {
      acc += std::log(static_cast<long double>(n));
      table_[static_cast<std::size_t>(n)] = static_cast<double>(acc);
    }
  }

  double log_factorial(std::int64_t n) const { return table_[static_cast<std::size_t>(n)]; }

  /// log C(n, k); -inf whenever the coefficient is zero (k < 0, k > n or n < 0).
  double log_binom(std::int64_t n, std::int64_t k) const {
    if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return table_[static_cast<std::size_t>(n)] - table_[static_cast<std::size_t>(k)] -
           table_[static_cast<std::size_t>(n - k)];
  }

 private:
  std::vector<double> table_;
};

/// C(n, k) as a big integer; zero whenever k < 0, k > n or n < 0.
inline const BigInt& exact_binom(std::int64_t n, std::int64_t k) {
  static const BigInt zero = 0;
  if (n < 0 || k < 0 || k > n) return zero;
  thread_local std::vector<std::vector<BigInt>> rows;
  while (static_cast<std::int64_t>(rows.size()) <= n) {
    const std::size_t r = rows.size();
    std::vector<BigInt> row(r + 1);
    row[0] = row[r] = 1;
    for (std::size_t j = 1; j < r; ++j) row[j] = rows[r - 1][j - 1] + rows[r - 1][j];
    rows.push_back(std::move(row));
  }
  return rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  void scale(double s) noexcept {
    sum_ *= s;
    c_ *= s;
  }
  double value() const noexcept { return sum_ + c_; }

 private:
  double sum_ = 0.0, c_ = 0.0;
};

/// Sums exp(log_term) over a stream of terms, rescaling by the running
/// maximum exponent so that no partial sum underflows or overflows.
class LogSumExp {
 public:
  void add(double log_term) noexcept {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) sum_.scale(std::exp(max_ - log_term));
      max_ = log_term;
    }
    sum_.add(std::exp(log_term - max_));
  }
  double log_value() const noexcept {
    const double v = sum_.value();
    return v > 0 ? max_ + std::log(v) : -std::numeric_limits<double>::infinity();
  }
  double value() const noexcept {
    return max_ == -std::numeric_limits<double>::infinity() ? 0.0 : sum_.value() * std::exp(max_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  CompensatedSum sum_;
};

}  // namespace cminhash
