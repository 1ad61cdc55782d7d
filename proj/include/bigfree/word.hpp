#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bigfree/rational.hpp"

namespace bigfree {

/// One letter occurrence: a_index (sign +1) or its formal inverse (sign -1).
struct Letter {
  long long index = 1;
  int sign = +1;

  Letter inverse() const { return {index, -sign}; }
  bool operator==(const Letter&) const = default;
};

/// Nonempty run of letters in word order.
struct FiniteSeg {
  std::vector<Letter> letters;
  bool operator==(const FiniteSeg&) const = default;
};

enum class TailDir { Forward, Backward };

/// Arithmetic-progression tail.
///
/// Forward(s, d, sign) spells  a_s a_{s+d} a_{s+2d} ...        (order type omega)
/// Backward(s, d, sign) spells ... a_{s+2d} a_{s+d} a_s        (order type omega*)
///
/// All letters carry the same sign. Offsets address generated letters:
/// offset j names index s + j*d; for Backward, j counts from the final
/// letter, so larger offsets come earlier in word order.
struct TailSeg {
  TailDir dir = TailDir::Forward;
  long long start = 1;
  long long stride = 1;
  int sign = +1;

  long long index_at(long long offset) const { return start + offset * stride; }
  bool contains_index(long long n) const {
    return n >= start && (n - start) % stride == 0;
  }
  bool operator==(const TailSeg&) const = default;
};

using Segment = std::variant<FiniteSeg, TailSeg>;

/// A transfinite word in the supported class: a finite concatenation of
/// finite runs and forward/backward tails. Empty segment list is the
/// identity word.
struct Word {
  std::vector<Segment> segments;

  bool empty() const { return segments.empty(); }
  bool is_finite() const;
  bool operator==(const Word&) const = default;
};

/// Address of one letter occurrence: segment plus within-segment offset.
struct Position {
  std::size_t segment = 0;
  long long offset = 0;
  bool operator==(const Position&) const = default;
};

/// Checks structural invariants (nonempty finite runs, indices >= 1,
/// strides >= 1); throws domain_error on violation.
void validate_word(const Word& w);

void validate_position(const Word& w, const Position& p);
Letter letter_at(const Word& w, const Position& p);

/// Word-order comparison of two valid positions: <0, 0, >0.
int position_cmp(const Word& w, const Position& a, const Position& b);

// -- parsing / printing -----------------------------------------------------

class parse_error : public domain_error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : domain_error(what), offset(offset) {}
  std::size_t offset;
};

/// Grammar: whitespace-separated tokens
///   a<k>  letter a_k          A<k>  its inverse            (k >= 1)
///   T(<s>) T(<s>,<d>)         forward tail a_s a_{s+d} ...
///   R(<s>) R(<s>,<d>)         backward tail ... a_{s+d} a_s
///   primed T' / R' invert every letter of the tail
/// Empty input (or the single token ε) is the identity word.
Word parse_word(std::string_view text);

/// Canonical text form; reparses to an equal word.
std::string format_word(const Word& w);

// -- group operations -------------------------------------------------------

Word concat(const Word& a, const Word& b);
Word invert(const Word& w);

/// Canonical reduced form: no remaining cancellation, adjacent finite runs
/// merged, tails maximally extended.
Word reduce(const Word& w);

/// Equality in BF(A): canonical forms compared syntactically.
bool equals(const Word& a, const Word& b);

/// Occurrences of a_n, both signs counted, in w as given.
long long multiplicity(const Word& w, long long n);

// -- cancellation pairings (the involution-based reduction witness) ---------

/// Pairs every letter of one tail with the equally-indexed letter of
/// another tail, for indices >= from_index.
struct MirrorRule {
  std::size_t seg_a = 0;
  std::size_t seg_b = 0;
  long long from_index = 1;
};

struct CancellationPairing {
  std::vector<std::pair<Position, Position>> pairs;
  std::vector<MirrorRule> mirrors;
};

/// True iff the induced set T and involution * satisfy all four
/// cancellation conditions. Throws on invalid positions or ill-formed
/// mirror rules.
bool validate_cancellation(const Word& w, const CancellationPairing& p);

// -- subwords and retractions -----------------------------------------------

/// Contiguous restriction, bounds inclusive; nullopt means word start/end.
/// Requires w canonical and from <= to.
Word subword(const Word& w, std::optional<Position> from, std::optional<Position> to);

/// Finite set of letter indices or the complement of one.
struct AlphabetSet {
  bool complement = false;
  std::set<long long> indices;

  bool contains(long long i) const {
    bool in = indices.count(i) != 0;
    return complement ? !in : in;
  }
  static AlphabetSet all() { return {true, {}}; }
  static AlphabetSet of(std::initializer_list<long long> xs) { return {false, xs}; }
};

/// Deletes all letters outside keep and reduces.
Word retract(const Word& w, const AlphabetSet& keep);

/// Maximal kept blocks of w in word order, each reduced.
std::vector<Word> split_string(const Word& w, const AlphabetSet& keep);

// -- cuts: the positions "between letters" ----------------------------------

/// A cut addresses a gap in the word: at a segment boundary, inside a
/// finite run before letter k, inside a forward tail before generated
/// letter j (j >= 1), or inside a backward tail with j generated letters
/// still to come after it (j >= 1).
struct Cut {
  enum class Kind { AtBoundary, InFinite, InTailF, InTailB } kind = Kind::AtBoundary;
  std::size_t seg = 0;
  long long k = 0;
  bool operator==(const Cut&) const = default;
};

int cut_cmp(const Cut& a, const Cut& b);
void validate_cut(const Word& w, const Cut& c);

Word word_prefix(const Word& w, const Cut& c);
Word word_suffix(const Word& w, const Cut& c);
Word word_between(const Word& w, const Cut& a, const Cut& b);

/// All segment-boundary cuts plus every within-finite cut and the first
/// few within-tail cuts; used by tameness audits.
std::vector<Cut> sample_cuts(const Word& w, long long tail_depth = 3);

}  // namespace bigfree
