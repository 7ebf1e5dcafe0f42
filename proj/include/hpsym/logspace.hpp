#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace hpsym {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.6931471805599453094;

// Relative agreement between the positive and negative partial sums below
// which a signed log-domain sum is declared exactly zero.
inline constexpr double kCancelEps = 1e-13;

// Signed log-domain scalar: value = sign * exp(log_mag).
// sign == 0 is exact zero; log_mag is ignored in that case.
struct LogReal {
  int sign = 0;
  double log_mag = kNegInf;

  static LogReal zero() { return {}; }

  static LogReal from_log(double lm, int s = +1) {
    if (s == 0 || lm == kNegInf) return {};
    return {s > 0 ? +1 : -1, lm};
  }

  static LogReal from_linear(double x) {
    if (x == 0.0) return {};
    return {x > 0 ? +1 : -1, std::log(std::abs(x))};
  }

  double to_linear() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_mag);
  }

  bool is_zero() const { return sign == 0; }

  LogReal operator*(const LogReal& o) const {
    if (sign == 0 || o.sign == 0) return {};
    return {sign * o.sign, log_mag + o.log_mag};
  }

  // x^2 in log domain; always non-negative.
  LogReal squared() const {
    if (sign == 0) return {};
    return {+1, 2.0 * log_mag};
  }

  // sqrt of a non-negative value.
  LogReal sqrt() const {
    if (sign == 0) return {};
    if (sign < 0) throw std::domain_error("LogReal::sqrt of negative value");
    return {+1, 0.5 * log_mag};
  }

  LogReal operator-() const {
    if (sign == 0) return {};
    return {-sign, log_mag};
  }

  bool operator==(const LogReal& o) const {
    if (sign == 0 && o.sign == 0) return true;
    return sign == o.sign && log_mag == o.log_mag;
  }
};

// Cumulative log-factorial ln(n!). Values up to HPSYM_LOG_FACTORIAL_MAX come
// from a table built once by running summation (exact reuse across calls);
// larger arguments fall back to lgamma.
#ifndef HPSYM_LOG_FACTORIAL_MAX
#define HPSYM_LOG_FACTORIAL_MAX 4096
#endif

inline double log_factorial(long n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(HPSYM_LOG_FACTORIAL_MAX + 1);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// ln C(n, r) as a positive LogReal; exact zero when r is out of [0, n].
// Subtraction runs in a canonical order so C(n, r) and C(n, n-r) are
// bit-identical.
inline LogReal log_binomial(long n, long r) {
  if (n < 0) throw std::invalid_argument("log_binomial: n must be >= 0");
  if (r < 0 || r > n) return LogReal::zero();
  const long lo = std::min(r, n - r);
  return LogReal::from_log(log_factorial(n) - log_factorial(lo) - log_factorial(n - lo));
}

// Streaming signed log-sum-exp. Keeps positive and negative partial sums
// rescaled by the running maximum exponent.
class LogAccumulator {
 public:
  void push(const LogReal& x) {
    if (x.sign == 0) return;
    if (x.log_mag > max_) {
      const double scale = std::exp(max_ - x.log_mag);
      pos_ *= scale;
      neg_ *= scale;
      max_ = x.log_mag;
    }
    const double v = std::exp(x.log_mag - max_);
    if (x.sign > 0)
      pos_ += v;
    else
      neg_ += v;
  }

  void push_log(double lm, int s = +1) { push(LogReal::from_log(lm, s)); }

  LogReal finalize() const {
    if (pos_ == 0.0 && neg_ == 0.0) return LogReal::zero();
    const double diff = pos_ - neg_;
    if (std::abs(diff) <= kCancelEps * std::max(pos_, neg_)) return LogReal::zero();
    return LogReal{diff > 0 ? +1 : -1, max_ + std::log(std::abs(diff))};
  }

 private:
  double max_ = kNegInf;
  double pos_ = 0.0;
  double neg_ = 0.0;
};

inline LogReal log_sum_exp(std::span<const LogReal> terms) {
  LogAccumulator acc;
  for (const auto& t : terms) acc.push(t);
  return acc.finalize();
}

inline LogReal log_sum_exp(const std::vector<LogReal>& terms) {
  return log_sum_exp(std::span<const LogReal>(terms));
}

}  // namespace hpsym
