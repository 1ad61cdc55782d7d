#pragma once

#include <string>
#include <vector>

#include "bigfree/rational.hpp"

namespace bigfree {

/// Summable, non-increasing, strictly positive length sequence l_1, l_2, ...
/// with closed-form tail sums: finitely many explicit leading values, then
/// a geometric tail l_n = c * r^(n-1).
struct LengthAssignment {
  Rat c = Rat(1, 2);
  Rat r = Rat(1, 2);
  std::vector<Rat> head;  // overrides for l_1 .. l_k

  /// Throws unless positive, non-increasing and 0 < r < 1.
  void validate() const;

  Rat l(long long n) const;

  /// sum_{j >= 0} l(s + j*d)
  Rat tail_total(long long s, long long d) const;

  /// sum_{j < count} l(s + j*d)
  Rat tail_partial(long long s, long long d, long long count) const;

  bool operator==(const LengthAssignment&) const = default;
};

/// Parses "geometric:c=<rat>,r=<rat>" with rationals as p/q, optionally
/// followed by ",head=v1|v2|..." for explicit leading values.
LengthAssignment parse_iota(const std::string& spec);

std::string format_iota(const LengthAssignment& iota);

}  // namespace bigfree
