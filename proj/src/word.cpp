#include "bigfree/word.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>

namespace bigfree {

bool Word::is_finite() const {
  for (const Segment& s : segments)
    if (std::holds_alternative<TailSeg>(s)) return false;
  return true;
}

void validate_word(const Word& w) {
  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      if (f->letters.empty()) throw domain_error("empty finite segment");
      for (const Letter& l : f->letters) {
        if (l.index < 1) throw domain_error("letter index must be at least 1");
        if (l.sign != 1 && l.sign != -1) throw domain_error("letter sign must be +1 or -1");
      }
    } else {
      const auto& t = std::get<TailSeg>(s);
      if (t.start < 1) throw domain_error("tail start must be at least 1");
      if (t.stride < 1) throw domain_error("tail stride must be at least 1");
      if (t.sign != 1 && t.sign != -1) throw domain_error("tail sign must be +1 or -1");
    }
  }
}

void validate_position(const Word& w, const Position& p) {
  if (p.segment >= w.segments.size()) throw domain_error("position: segment out of range");
  const Segment& s = w.segments[p.segment];
  if (const auto* f = std::get_if<FiniteSeg>(&s)) {
    if (p.offset < 0 || p.offset >= static_cast<long long>(f->letters.size()))
      throw domain_error("position: offset out of range");
  } else {
    if (p.offset < 0) throw domain_error("position: negative tail offset");
  }
}

Letter letter_at(const Word& w, const Position& p) {
  validate_position(w, p);
  const Segment& s = w.segments[p.segment];
  if (const auto* f = std::get_if<FiniteSeg>(&s)) return f->letters[p.offset];
  const auto& t = std::get<TailSeg>(s);
  return Letter{t.index_at(p.offset), t.sign};
}

int position_cmp(const Word& w, const Position& a, const Position& b) {
  if (a.segment != b.segment) return a.segment < b.segment ? -1 : 1;
  const Segment& s = w.segments[a.segment];
  bool backward = std::holds_alternative<TailSeg>(s) &&
                  std::get<TailSeg>(s).dir == TailDir::Backward;
  long long x = a.offset, y = b.offset;
  if (backward) std::swap(x, y);
  return x < y ? -1 : (x > y ? 1 : 0);
}

// -- parsing -----------------------------------------------------------------

namespace {

long long parse_uint(std::string_view tok, std::size_t& i, std::size_t base_off) {
  std::size_t start = i;
  long long v = 0;
  while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) {
    v = v * 10 + (tok[i] - '0');
    if (v > (1LL << 48)) throw parse_error("index too large", base_off + start);
    ++i;
  }
  if (i == start) throw parse_error("expected a number", base_off + i);
  return v;
}

Segment parse_tail(std::string_view tok, std::size_t off) {
  std::size_t i = 1;
  TailSeg t;
  t.dir = tok[0] == 'T' ? TailDir::Forward : TailDir::Backward;
  t.sign = +1;
  if (i < tok.size() && tok[i] == '\'') {
    t.sign = -1;
    ++i;
  }
  if (i >= tok.size() || tok[i] != '(') throw parse_error("expected '('", off + i);
  ++i;
  t.start = parse_uint(tok, i, off);
  if (i < tok.size() && tok[i] == ',') {
    ++i;
    t.stride = parse_uint(tok, i, off);
  }
  if (i >= tok.size() || tok[i] != ')') throw parse_error("expected ')'", off + i);
  ++i;
  if (i != tok.size()) throw parse_error("trailing characters in tail token", off + i);
  if (t.start < 1) throw parse_error("tail start must be at least 1", off);
  if (t.stride < 1) throw parse_error("tail stride must be at least 1", off);
  return t;
}

}  // namespace

Word parse_word(std::string_view text) {
  Word w;
  std::vector<Letter> run;
  auto flush = [&] {
    if (!run.empty()) {
      w.segments.push_back(FiniteSeg{std::move(run)});
      run.clear();
    }
  };
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t tok_off = i;
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view tok = text.substr(i, j - i);
    i = j;
    if (tok == "\xce\xb5") continue;  // ε, the identity word
    char c = tok[0];
    if (c == 'a' || c == 'A') {
      std::size_t k = 1;
      long long idx = parse_uint(tok, k, tok_off);
      if (k != tok.size()) throw parse_error("trailing characters in letter token", tok_off + k);
      if (idx < 1) throw parse_error("letter index must be at least 1", tok_off);
      run.push_back(Letter{idx, c == 'a' ? +1 : -1});
    } else if (c == 'T' || c == 'R') {
      flush();
      w.segments.push_back(parse_tail(tok, tok_off));
    } else {
      throw parse_error("unrecognized token", tok_off);
    }
  }
  flush();
  validate_word(w);
  return w;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "\xce\xb5";
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << ' ';
    first = false;
  };
  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      for (const Letter& l : f->letters) {
        sep();
        out << (l.sign > 0 ? 'a' : 'A') << l.index;
      }
    } else {
      const auto& t = std::get<TailSeg>(s);
      sep();
      out << (t.dir == TailDir::Forward ? 'T' : 'R');
      if (t.sign < 0) out << '\'';
      out << '(' << t.start;
      if (t.stride != 1) out << ',' << t.stride;
      out << ')';
    }
  }
  return out.str();
}

// -- group operations ---------------------------------------------------------

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.segments.insert(out.segments.end(), b.segments.begin(), b.segments.end());
  return out;
}

Word invert(const Word& w) {
  Word out;
  out.segments.reserve(w.segments.size());
  for (auto it = w.segments.rbegin(); it != w.segments.rend(); ++it) {
    if (const auto* f = std::get_if<FiniteSeg>(&*it)) {
      FiniteSeg g;
      g.letters.reserve(f->letters.size());
      for (auto lt = f->letters.rbegin(); lt != f->letters.rend(); ++lt)
        g.letters.push_back(lt->inverse());
      out.segments.push_back(std::move(g));
    } else {
      TailSeg t = std::get<TailSeg>(*it);
      t.dir = t.dir == TailDir::Forward ? TailDir::Backward : TailDir::Forward;
      t.sign = -t.sign;
      out.segments.push_back(t);
    }
  }
  return out;
}

namespace {

void stack_reduce_letters(std::vector<Letter>& v) {
  std::vector<Letter> out;
  out.reserve(v.size());
  for (const Letter& l : v) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  v = std::move(out);
}

FiniteSeg ascending_run(long long lo, long long hi, long long stride, int sign) {
  FiniteSeg f;
  for (long long n = lo; n <= hi; n += stride) f.letters.push_back(Letter{n, sign});
  return f;
}

FiniteSeg descending_run(long long hi, long long lo, long long stride, int sign) {
  FiniteSeg f;
  for (long long n = hi; n >= lo; n -= stride) f.letters.push_back(Letter{n, sign});
  return f;
}

// Tries to rewrite the adjacent pair (segs[i], segs[i+1]); returns true if
// anything changed. May erase one or both segments.
bool combine_at(std::vector<Segment>& segs, std::size_t i) {
  Segment& sa = segs[i];
  Segment& sb = segs[i + 1];
  auto* fa = std::get_if<FiniteSeg>(&sa);
  auto* fb = std::get_if<FiniteSeg>(&sb);
  auto* ta = std::get_if<TailSeg>(&sa);
  auto* tb = std::get_if<TailSeg>(&sb);

  if (fa && fb) {
    fa->letters.insert(fa->letters.end(), fb->letters.begin(), fb->letters.end());
    stack_reduce_letters(fa->letters);
    segs.erase(segs.begin() + i + 1);
    if (fa->letters.empty()) segs.erase(segs.begin() + i);
    return true;
  }

  if (fa && tb && tb->dir == TailDir::Forward) {
    // boundary cancellation against the tail head, plus absorption of
    // letters that extend the progression downward
    bool changed = false;
    while (!fa->letters.empty()) {
      const Letter& back = fa->letters.back();
      if (back == Letter{tb->start, -tb->sign}) {
        fa->letters.pop_back();
        tb->start += tb->stride;
        changed = true;
      } else if (tb->start - tb->stride >= 1 &&
                 back == Letter{tb->start - tb->stride, tb->sign}) {
        fa->letters.pop_back();
        tb->start -= tb->stride;
        changed = true;
      } else {
        break;
      }
    }
    if (fa->letters.empty()) segs.erase(segs.begin() + i);
    return changed;
  }

  if (ta && fb && ta->dir == TailDir::Backward) {
    bool changed = false;
    std::size_t consumed = 0;
    while (consumed < fb->letters.size()) {
      const Letter& front = fb->letters[consumed];
      if (front == Letter{ta->start, -ta->sign}) {
        ++consumed;
        ta->start += ta->stride;
        changed = true;
      } else if (ta->start - ta->stride >= 1 &&
                 front == Letter{ta->start - ta->stride, ta->sign}) {
        ++consumed;
        ta->start -= ta->stride;
        changed = true;
      } else {
        break;
      }
    }
    if (consumed > 0)
      fb->letters.erase(fb->letters.begin(), fb->letters.begin() + consumed);
    if (fb->letters.empty()) segs.erase(segs.begin() + i + 1);
    return changed;
  }

  if (ta && tb && ta->dir == TailDir::Forward && tb->dir == TailDir::Backward) {
    // omega + omega* junction: the cofinal parts cancel in mirror fashion
    // exactly when the progressions eventually coincide with opposite signs
    if (ta->stride == tb->stride && ta->sign == -tb->sign &&
        (ta->start - tb->start) % ta->stride == 0) {
      long long d = ta->stride;
      long long m = std::max(ta->start, tb->start);
      TailSeg a = *ta, b = *tb;
      std::vector<Segment> repl;
      if (a.start < m) repl.push_back(ascending_run(a.start, m - d, d, a.sign));
      if (b.start < m) repl.push_back(descending_run(m - d, b.start, d, b.sign));
      segs.erase(segs.begin() + i, segs.begin() + i + 2);
      segs.insert(segs.begin() + i, repl.begin(), repl.end());
      return true;
    }
    return false;
  }

  if (ta && tb && ta->dir == TailDir::Backward && tb->dir == TailDir::Forward) {
    // omega* + omega junction: letters meet head-on at the seam
    bool changed = false;
    while (ta->sign == -tb->sign && ta->start == tb->start) {
      if (ta->stride == tb->stride) {
        segs.erase(segs.begin() + i, segs.begin() + i + 2);
        return true;
      }
      ta->start += ta->stride;
      tb->start += tb->stride;
      changed = true;
    }
    // canonical tie-break: a letter continuing both progressions belongs
    // to the backward tail
    if (ta->sign == tb->sign && ta->stride == tb->stride &&
        tb->start == ta->start - ta->stride) {
      ta->start = tb->start;
      tb->start += tb->stride;
      changed = true;
    }
    return changed;
  }

  return false;
}

}  // namespace

Word reduce(const Word& w) {
  validate_word(w);
  std::vector<Segment> segs;
  segs.reserve(w.segments.size());
  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      FiniteSeg c = *f;
      stack_reduce_letters(c.letters);
      if (!c.letters.empty()) segs.push_back(std::move(c));
    } else {
      segs.push_back(s);
    }
  }
  bool changed = true;
  long long guard = 0;
  while (changed) {
    changed = false;
    if (++guard > (1LL << 24)) throw domain_error("reduce: rewrite did not terminate");
    for (std::size_t i = 0; i + 1 < segs.size();) {
      if (combine_at(segs, i)) {
        changed = true;
        i = i > 0 ? i - 1 : 0;
      } else {
        ++i;
      }
    }
  }
  Word out;
  out.segments = std::move(segs);
  return out;
}

bool equals(const Word& a, const Word& b) { return reduce(a) == reduce(b); }

long long multiplicity(const Word& w, long long n) {
  long long count = 0;
  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      for (const Letter& l : f->letters)
        if (l.index == n) ++count;
    } else {
      if (std::get<TailSeg>(s).contains_index(n)) ++count;
    }
  }
  return count;
}

// -- cuts ---------------------------------------------------------------------

namespace {

// Key increasing along word order: (segment the cut is attached to, rank).
std::pair<std::size_t, long long> cut_key(const Cut& c) {
  switch (c.kind) {
    case Cut::Kind::AtBoundary:
      return {c.seg, std::numeric_limits<long long>::min()};
    case Cut::Kind::InFinite:
    case Cut::Kind::InTailF:
      return {c.seg, c.k};
    case Cut::Kind::InTailB:
      return {c.seg, -c.k};
  }
  return {c.seg, 0};
}

}  // namespace

int cut_cmp(const Cut& a, const Cut& b) {
  auto ka = cut_key(a), kb = cut_key(b);
  if (ka < kb) return -1;
  if (kb < ka) return 1;
  return 0;
}

void validate_cut(const Word& w, const Cut& c) {
  const std::size_t n = w.segments.size();
  switch (c.kind) {
    case Cut::Kind::AtBoundary:
      if (c.seg > n) throw domain_error("cut: boundary out of range");
      return;
    case Cut::Kind::InFinite: {
      if (c.seg >= n) throw domain_error("cut: segment out of range");
      const auto* f = std::get_if<FiniteSeg>(&w.segments[c.seg]);
      if (!f || c.k < 1 || c.k >= static_cast<long long>(f->letters.size()))
        throw domain_error("cut: bad finite cut");
      return;
    }
    case Cut::Kind::InTailF: {
      if (c.seg >= n) throw domain_error("cut: segment out of range");
      const auto* t = std::get_if<TailSeg>(&w.segments[c.seg]);
      if (!t || t->dir != TailDir::Forward || c.k < 1)
        throw domain_error("cut: bad forward-tail cut");
      return;
    }
    case Cut::Kind::InTailB: {
      if (c.seg >= n) throw domain_error("cut: segment out of range");
      const auto* t = std::get_if<TailSeg>(&w.segments[c.seg]);
      if (!t || t->dir != TailDir::Backward || c.k < 1)
        throw domain_error("cut: bad backward-tail cut");
      return;
    }
  }
}

namespace {

// Part of segment s strictly before cut c (which lies inside s).
std::vector<Segment> left_piece(const Segment& s, const Cut& c) {
  if (c.kind == Cut::Kind::InFinite) {
    const auto& f = std::get<FiniteSeg>(s);
    return {FiniteSeg{{f.letters.begin(), f.letters.begin() + c.k}}};
  }
  const auto& t = std::get<TailSeg>(s);
  if (c.kind == Cut::Kind::InTailF)
    return {ascending_run(t.start, t.index_at(c.k - 1), t.stride, t.sign)};
  TailSeg rest = t;
  rest.start = t.index_at(c.k);
  return {rest};
}

// Part of segment s at or after cut c.
std::vector<Segment> right_piece(const Segment& s, const Cut& c) {
  if (c.kind == Cut::Kind::InFinite) {
    const auto& f = std::get<FiniteSeg>(s);
    return {FiniteSeg{{f.letters.begin() + c.k, f.letters.end()}}};
  }
  const auto& t = std::get<TailSeg>(s);
  if (c.kind == Cut::Kind::InTailF) {
    TailSeg rest = t;
    rest.start = t.index_at(c.k);
    return {rest};
  }
  return {descending_run(t.index_at(c.k - 1), t.start, t.stride, t.sign)};
}

Word assemble(std::vector<Segment> parts) {
  Word w;
  for (Segment& s : parts) {
    if (const auto* f = std::get_if<FiniteSeg>(&s))
      if (f->letters.empty()) continue;
    w.segments.push_back(std::move(s));
  }
  return reduce(w);
}

}  // namespace

Word word_prefix(const Word& w, const Cut& c) {
  validate_cut(w, c);
  std::vector<Segment> parts;
  for (std::size_t i = 0; i < c.seg; ++i) parts.push_back(w.segments[i]);
  if (c.kind != Cut::Kind::AtBoundary) {
    auto piece = left_piece(w.segments[c.seg], c);
    parts.insert(parts.end(), piece.begin(), piece.end());
  }
  return assemble(std::move(parts));
}

Word word_suffix(const Word& w, const Cut& c) {
  validate_cut(w, c);
  std::vector<Segment> parts;
  std::size_t first_full = c.seg;
  if (c.kind != Cut::Kind::AtBoundary) {
    auto piece = right_piece(w.segments[c.seg], c);
    parts.insert(parts.end(), piece.begin(), piece.end());
    first_full = c.seg + 1;
  }
  for (std::size_t i = first_full; i < w.segments.size(); ++i)
    parts.push_back(w.segments[i]);
  return assemble(std::move(parts));
}

Word word_between(const Word& w, const Cut& a, const Cut& b) {
  validate_cut(w, a);
  validate_cut(w, b);
  int c = cut_cmp(a, b);
  if (c > 0) throw domain_error("word_between: unordered cuts");
  if (c == 0) return {};

  if (a.kind != Cut::Kind::AtBoundary && b.kind != Cut::Kind::AtBoundary &&
      a.seg == b.seg) {
    const Segment& s = w.segments[a.seg];
    if (a.kind == Cut::Kind::InFinite) {
      const auto& f = std::get<FiniteSeg>(s);
      return assemble({FiniteSeg{{f.letters.begin() + a.k, f.letters.begin() + b.k}}});
    }
    const auto& t = std::get<TailSeg>(s);
    if (a.kind == Cut::Kind::InTailF)
      return assemble({ascending_run(t.index_at(a.k), t.index_at(b.k - 1), t.stride, t.sign)});
    // backward tail: offsets b.k .. a.k-1, descending in word order
    return assemble({descending_run(t.index_at(a.k - 1), t.index_at(b.k), t.stride, t.sign)});
  }

  std::vector<Segment> parts;
  std::size_t lo = a.seg;
  if (a.kind != Cut::Kind::AtBoundary) {
    auto piece = right_piece(w.segments[a.seg], a);
    parts.insert(parts.end(), piece.begin(), piece.end());
    lo = a.seg + 1;
  }
  std::size_t hi = b.seg;  // exclusive bound on full segments
  for (std::size_t i = lo; i < hi; ++i) parts.push_back(w.segments[i]);
  if (b.kind != Cut::Kind::AtBoundary) {
    auto piece = left_piece(w.segments[b.seg], b);
    parts.insert(parts.end(), piece.begin(), piece.end());
  }
  return assemble(std::move(parts));
}

std::vector<Cut> sample_cuts(const Word& w, long long tail_depth) {
  std::vector<Cut> cuts;
  for (std::size_t b = 0; b <= w.segments.size(); ++b)
    cuts.push_back(Cut{Cut::Kind::AtBoundary, b, 0});
  for (std::size_t i = 0; i < w.segments.size(); ++i) {
    if (const auto* f = std::get_if<FiniteSeg>(&w.segments[i])) {
      for (long long k = 1; k < static_cast<long long>(f->letters.size()); ++k)
        cuts.push_back(Cut{Cut::Kind::InFinite, i, k});
    } else {
      const auto& t = std::get<TailSeg>(w.segments[i]);
      auto kind = t.dir == TailDir::Forward ? Cut::Kind::InTailF : Cut::Kind::InTailB;
      for (long long k = 1; k <= tail_depth; ++k) cuts.push_back(Cut{kind, i, k});
    }
  }
  std::sort(cuts.begin(), cuts.end(),
            [](const Cut& x, const Cut& y) { return cut_cmp(x, y) < 0; });
  return cuts;
}

// -- subword ------------------------------------------------------------------

Word subword(const Word& w, std::optional<Position> from, std::optional<Position> to) {
  if (w.empty()) {
    if (from || to) throw domain_error("subword: position in empty word");
    return {};
  }
  if (from) validate_position(w, *from);
  if (to) validate_position(w, *to);
  if (from && to && position_cmp(w, *from, *to) > 0)
    throw domain_error("subword: unordered bounds");

  // inclusive position bounds become cuts just before `from` / after `to`
  auto cut_before = [&](const Position& p) -> Cut {
    const Segment& s = w.segments[p.segment];
    if (std::holds_alternative<FiniteSeg>(s)) {
      if (p.offset == 0) return Cut{Cut::Kind::AtBoundary, p.segment, 0};
      return Cut{Cut::Kind::InFinite, p.segment, p.offset};
    }
    const auto& t = std::get<TailSeg>(s);
    if (t.dir == TailDir::Forward) {
      if (p.offset == 0) return Cut{Cut::Kind::AtBoundary, p.segment, 0};
      return Cut{Cut::Kind::InTailF, p.segment, p.offset};
    }
    return Cut{Cut::Kind::InTailB, p.segment, p.offset + 1};
  };
  auto cut_after = [&](const Position& p) -> Cut {
    const Segment& s = w.segments[p.segment];
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      if (p.offset + 1 == static_cast<long long>(f->letters.size()))
        return Cut{Cut::Kind::AtBoundary, p.segment + 1, 0};
      return Cut{Cut::Kind::InFinite, p.segment, p.offset + 1};
    }
    const auto& t = std::get<TailSeg>(s);
    if (t.dir == TailDir::Forward) return Cut{Cut::Kind::InTailF, p.segment, p.offset + 1};
    if (p.offset == 0) return Cut{Cut::Kind::AtBoundary, p.segment + 1, 0};
    return Cut{Cut::Kind::InTailB, p.segment, p.offset};
  };

  Cut a = from ? cut_before(*from) : Cut{Cut::Kind::AtBoundary, 0, 0};
  Cut b = to ? cut_after(*to) : Cut{Cut::Kind::AtBoundary, w.segments.size(), 0};
  return word_between(w, a, b);
}

// -- retract / split ----------------------------------------------------------

namespace {

// Progression indices of t that are excluded by keep; only meaningful when
// finitely many are (keep cofinite, or keep finite after the cofinal cap).
std::vector<long long> excluded_in_tail(const TailSeg& t, const AlphabetSet& keep) {
  std::vector<long long> out;
  for (long long n : keep.indices)
    if (t.contains_index(n)) out.push_back(n);
  return out;
}

}  // namespace

Word retract(const Word& w0, const AlphabetSet& keep) {
  Word w = reduce(w0);
  std::vector<Segment> parts;
  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      FiniteSeg g;
      for (const Letter& l : f->letters)
        if (keep.contains(l.index)) g.letters.push_back(l);
      if (!g.letters.empty()) parts.push_back(std::move(g));
      continue;
    }
    const auto& t = std::get<TailSeg>(s);
    if (keep.complement) {
      std::vector<long long> ex = excluded_in_tail(t, keep);
      if (ex.empty()) {
        parts.push_back(t);
        continue;
      }
      long long cap = *std::max_element(ex.begin(), ex.end());
      TailSeg rest = t;
      rest.start = cap + t.stride;
      FiniteSeg head;
      for (long long n = t.start; n <= cap; n += t.stride)
        if (keep.contains(n)) head.letters.push_back(Letter{n, t.sign});
      if (t.dir == TailDir::Forward) {
        if (!head.letters.empty()) parts.push_back(head);
        parts.push_back(rest);
      } else {
        std::reverse(head.letters.begin(), head.letters.end());
        parts.push_back(rest);
        if (!head.letters.empty()) parts.push_back(head);
      }
    } else {
      // finite keep: only finitely many tail letters survive
      FiniteSeg g;
      for (long long n : keep.indices)
        if (t.contains_index(n)) g.letters.push_back(Letter{n, t.sign});
      std::sort(g.letters.begin(), g.letters.end(),
                [](const Letter& x, const Letter& y) { return x.index < y.index; });
      if (t.dir == TailDir::Backward)
        std::reverse(g.letters.begin(), g.letters.end());
      if (!g.letters.empty()) parts.push_back(std::move(g));
    }
  }
  Word out;
  out.segments = std::move(parts);
  return reduce(out);
}

std::vector<Word> split_string(const Word& w0, const AlphabetSet& keep) {
  Word w = reduce(w0);
  std::vector<Word> blocks;
  std::vector<Segment> cur;
  std::vector<Letter> run;
  auto flush_run = [&] {
    if (!run.empty()) {
      cur.push_back(FiniteSeg{run});
      run.clear();
    }
  };
  auto close_block = [&] {
    flush_run();
    if (!cur.empty()) {
      Word b;
      b.segments = std::move(cur);
      cur.clear();
      b = reduce(b);
      if (!b.empty()) blocks.push_back(std::move(b));
    }
  };

  for (const Segment& s : w.segments) {
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      for (const Letter& l : f->letters) {
        if (keep.contains(l.index))
          run.push_back(l);
        else
          close_block();
      }
      continue;
    }
    const auto& t = std::get<TailSeg>(s);
    bool cofinal_kept;
    long long cap;  // largest progression index with an exclusion at or below it
    if (keep.complement) {
      std::vector<long long> ex = excluded_in_tail(t, keep);
      cofinal_kept = true;
      cap = ex.empty() ? t.start - t.stride : *std::max_element(ex.begin(), ex.end());
    } else {
      cofinal_kept = false;
      cap = t.start - t.stride;
      for (long long n : keep.indices)
        if (t.contains_index(n)) cap = std::max(cap, n);
    }
    if (t.dir == TailDir::Forward) {
      for (long long n = t.start; n <= cap; n += t.stride) {
        if (keep.contains(n))
          run.push_back(Letter{n, t.sign});
        else
          close_block();
      }
      if (cofinal_kept) {
        flush_run();
        TailSeg rest = t;
        rest.start = cap + t.stride;
        cur.push_back(rest);
      } else {
        close_block();  // the infinite remainder is deleted
      }
    } else {
      if (cofinal_kept) {
        flush_run();
        TailSeg rest = t;
        rest.start = cap + t.stride;
        cur.push_back(rest);
      } else {
        close_block();
      }
      for (long long n = cap; n >= t.start; n -= t.stride) {
        if (keep.contains(n))
          run.push_back(Letter{n, t.sign});
        else
          close_block();
      }
    }
  }
  close_block();
  return blocks;
}

// -- cancellation pairings ------------------------------------------------------

namespace {

struct PosLess {
  bool operator()(const Position& a, const Position& b) const {
    return std::tie(a.segment, a.offset) < std::tie(b.segment, b.offset);
  }
};

struct PairingIndex {
  const Word& w;
  std::map<Position, Position, PosLess> partner;  // finite pairs, both directions
  std::vector<MirrorRule> mirrors;
  // per segment: smallest mirror offset covering it, if any
  std::map<std::size_t, long long> mirror_cover_from_offset;

  bool in_T(const Position& p) const {
    if (partner.count(p)) return true;
    auto it = mirror_cover_from_offset.find(p.segment);
    return it != mirror_cover_from_offset.end() && p.offset >= it->second;
  }
};

long long mirror_offset_in(const TailSeg& t, long long from_index) {
  return (from_index - t.start) / t.stride;
}

// Does every position of w in [lo, hi] (word order, inclusive) lie in T?
bool range_covered(const PairingIndex& ix, const Position& lo, const Position& hi) {
  const Word& w = ix.w;
  for (std::size_t seg = lo.segment; seg <= hi.segment; ++seg) {
    const Segment& s = w.segments[seg];
    bool is_lo = seg == lo.segment, is_hi = seg == hi.segment;
    if (const auto* f = std::get_if<FiniteSeg>(&s)) {
      long long o1 = is_lo ? lo.offset : 0;
      long long o2 = is_hi ? hi.offset : static_cast<long long>(f->letters.size()) - 1;
      for (long long o = o1; o <= o2; ++o)
        if (!ix.in_T(Position{seg, o})) return false;
      continue;
    }
    const auto& t = std::get<TailSeg>(s);
    // word-order window as an offset window [o1, o2], o2 possibly unbounded
    long long o1, o2;
    bool unbounded;
    if (t.dir == TailDir::Forward) {
      o1 = is_lo ? lo.offset : 0;
      unbounded = !is_hi;
      o2 = is_hi ? hi.offset : 0;
    } else {
      o1 = is_hi ? hi.offset : 0;
      unbounded = !is_lo;
      o2 = is_lo ? lo.offset : 0;
    }
    auto cov = ix.mirror_cover_from_offset.find(seg);
    long long covered_from =
        cov == ix.mirror_cover_from_offset.end() ? -1 : cov->second;
    if (unbounded) {
      if (covered_from < 0) return false;
      o2 = covered_from - 1;  // the rest is mirror-covered
    } else if (covered_from >= 0) {
      o2 = std::min(o2, covered_from - 1);
    }
    for (long long o = o1; o <= o2; ++o)
      if (!ix.in_T(Position{seg, o})) return false;
  }
  return true;
}

bool pos_in_range(const Word& w, const Position& p, const Position& lo, const Position& hi) {
  return position_cmp(w, lo, p) <= 0 && position_cmp(w, p, hi) <= 0;
}

// Offsets o >= min_off of tail segment `seg` whose positions fall in
// [lo, hi]; returns {first, last} with last = -1 meaning unbounded, or
// nullopt when empty. Offset sets of tails inside a position interval are
// always contiguous.
struct OffsetRange {
  long long first;
  long long last;  // -1 = unbounded above
};
std::optional<OffsetRange> tail_offsets_in_range(const Word& w, std::size_t seg,
                                                 long long min_off, const Position& lo,
                                                 const Position& hi) {
  if (seg < lo.segment || seg > hi.segment) return std::nullopt;
  const auto& t = std::get<TailSeg>(w.segments[seg]);
  long long first = min_off;
  long long last = -1;
  if (t.dir == TailDir::Forward) {
    if (seg == lo.segment) first = std::max(first, lo.offset);
    if (seg == hi.segment) last = hi.offset;
  } else {
    if (seg == hi.segment) first = std::max(first, hi.offset);
    if (seg == lo.segment) last = lo.offset;
  }
  if (last >= 0 && last < first) return std::nullopt;
  return OffsetRange{first, last};
}

}  // namespace

bool validate_cancellation(const Word& w, const CancellationPairing& p) {
  validate_word(w);
  PairingIndex ix{w, {}, p.mirrors, {}};

  for (const auto& [a, b] : p.pairs) {
    validate_position(w, a);
    validate_position(w, b);
  }
  for (const MirrorRule& m : p.mirrors) {
    if (m.seg_a >= w.segments.size() || m.seg_b >= w.segments.size())
      throw domain_error("mirror rule: segment out of range");
    const auto* ta = std::get_if<TailSeg>(&w.segments[m.seg_a]);
    const auto* tb = std::get_if<TailSeg>(&w.segments[m.seg_b]);
    if (!ta || !tb) throw domain_error("mirror rule: both segments must be tails");
    if (ta->dir == tb->dir)
      throw domain_error("mirror rule: must pair a forward and a backward tail");
    if (ta->stride != tb->stride) throw domain_error("mirror rule: stride mismatch");
    if (!ta->contains_index(m.from_index) || !tb->contains_index(m.from_index))
      throw domain_error("mirror rule: from_index not in both progressions");
  }

  // condition: * is a well-defined involution (disjoint coverage)
  for (const MirrorRule& m : p.mirrors) {
    for (std::size_t seg : {m.seg_a, m.seg_b}) {
      const auto& t = std::get<TailSeg>(w.segments[seg]);
      long long off = mirror_offset_in(t, m.from_index);
      auto [it, fresh] = ix.mirror_cover_from_offset.try_emplace(seg, off);
      if (!fresh) return false;  // two mirrors on one tail overlap cofinally
    }
  }
  auto covered_by_mirror = [&](const Position& q) {
    auto it = ix.mirror_cover_from_offset.find(q.segment);
    return it != ix.mirror_cover_from_offset.end() && q.offset >= it->second;
  };
  for (const auto& [a, b] : p.pairs) {
    if (a == b) return false;
    if (covered_by_mirror(a) || covered_by_mirror(b)) return false;
    if (ix.partner.count(a) || ix.partner.count(b)) return false;
    ix.partner[a] = b;
    ix.partner[b] = a;
  }

  // condition: w(t*) = w(t)^{-1}
  for (const auto& [a, b] : p.pairs)
    if (!(letter_at(w, a) == letter_at(w, b).inverse())) return false;
  for (const MirrorRule& m : p.mirrors) {
    const auto& ta = std::get<TailSeg>(w.segments[m.seg_a]);
    const auto& tb = std::get<TailSeg>(w.segments[m.seg_b]);
    if (ta.sign != -tb.sign) return false;
  }

  // elementary pairs to audit: every finite pair, and each mirror's
  // outermost pair (index = from_index); inner mirror pairs span subsets.
  std::vector<std::pair<Position, Position>> elems = p.pairs;
  for (const MirrorRule& m : p.mirrors) {
    const auto& ta = std::get<TailSeg>(w.segments[m.seg_a]);
    const auto& tb = std::get<TailSeg>(w.segments[m.seg_b]);
    elems.emplace_back(Position{m.seg_a, mirror_offset_in(ta, m.from_index)},
                       Position{m.seg_b, mirror_offset_in(tb, m.from_index)});
  }

  for (const auto& [t0, t1] : elems) {
    Position lo = t0, hi = t1;
    if (position_cmp(w, lo, hi) > 0) std::swap(lo, hi);

    // condition: [t, t*]_S = [t, t*]_T
    if (!range_covered(ix, lo, hi)) return false;

    // condition: [t, t*]_T is *-closed
    for (const auto& [a, b] : p.pairs) {
      if (pos_in_range(w, a, lo, hi) != pos_in_range(w, b, lo, hi)) return false;
    }
    for (const MirrorRule& m : p.mirrors) {
      const auto& ta = std::get<TailSeg>(w.segments[m.seg_a]);
      const auto& tb = std::get<TailSeg>(w.segments[m.seg_b]);
      auto ra = tail_offsets_in_range(w, m.seg_a, mirror_offset_in(ta, m.from_index), lo, hi);
      auto rb = tail_offsets_in_range(w, m.seg_b, mirror_offset_in(tb, m.from_index), lo, hi);
      // compare as index sets
      auto to_indices = [&](const std::optional<OffsetRange>& r,
                            const TailSeg& t) -> std::optional<std::pair<long long, long long>> {
        if (!r) return std::nullopt;
        long long first = t.index_at(r->first);
        long long last = r->last < 0 ? -1 : t.index_at(r->last);
        return std::make_pair(first, last);
      };
      if (to_indices(ra, ta) != to_indices(rb, tb)) return false;
    }
  }
  return true;
}

}  // namespace bigfree
