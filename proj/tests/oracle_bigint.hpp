#pragma once

// Test-only oracles, independent of the library's log-space path:
// exact big-integer binomials and 400-digit floating summation.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

namespace oracle {

using bigint = boost::multiprecision::cpp_int;
using bigfloat =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<400>>;

inline bigint binomial_exact(long n, long r) {
  if (r < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  bigint acc = 1;
  for (long i = 0; i < r; ++i) {
    acc *= (n - i);
    acc /= (i + 1);
  }
  return acc;
}

inline double log_binomial_exact(long n, long r) {
  const bigint b = binomial_exact(n, r);
  if (b == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(boost::multiprecision::log(bigfloat(b)));
}

// Signed high-precision sum of terms given as (sign, natural-log magnitude).
struct LogTerm {
  int sign;
  double log_mag;
};

inline bigfloat sum_exact(const std::vector<LogTerm>& terms) {
  bigfloat acc = 0;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    bigfloat v = boost::multiprecision::exp(bigfloat(t.log_mag));
    acc += t.sign > 0 ? v : -v;
  }
  return acc;
}

}  // namespace oracle
