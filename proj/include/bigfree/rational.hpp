#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace bigfree {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Error raised by any operation whose preconditions are violated at the
/// domain level (bad input, out-of-range point, oracle misuse, ...).
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rat rat(long long num, long long den = 1) { return Rat(Int(num), Int(den)); }

inline Rat rat_pow(const Rat& base, long long exp) {
  if (exp < 0) throw domain_error("rat_pow: negative exponent");
  Rat acc(1);
  Rat b = base;
  unsigned long long e = static_cast<unsigned long long>(exp);
  while (e != 0) {
    if (e & 1ULL) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

/// Parses "p", "-p", "p/q" with integer p, q.
Rat parse_rat(const std::string& s);

/// "p/q" when the denominator is not 1, plain "p" otherwise.
std::string rat_str(const Rat& q);

/// Smallest positive integer m with m * d > 1, for d > 0.
long long min_m_exceeding_inverse(const Rat& d);

}  // namespace bigfree
