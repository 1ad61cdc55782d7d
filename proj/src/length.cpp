#include "bigfree/length.hpp"

#include <sstream>

namespace bigfree {

Rat parse_rat(const std::string& s) {
  auto bad = [&] { throw domain_error("bad rational: '" + s + "'"); };
  if (s.empty()) bad();
  std::size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) bad();
    return Rat(num, den);
  } catch (const std::exception&) {
    bad();
  }
  return Rat();
}

std::string rat_str(const Rat& q) {
  std::ostringstream out;
  out << q;
  return out.str();
}

long long min_m_exceeding_inverse(const Rat& d) {
  if (d <= 0) throw domain_error("min_m_exceeding_inverse: need d > 0");
  // smallest m with m*d > 1, i.e. m > den/num
  Int num = numerator(d), den = denominator(d);
  Int m = den / num + 1;
  if (m < 1) m = 1;
  return static_cast<long long>(m);
}

void LengthAssignment::validate() const {
  if (c <= 0) throw domain_error("length assignment: c must be positive");
  if (r <= 0 || r >= 1) throw domain_error("length assignment: r must be in (0,1)");
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (head[i] <= 0) throw domain_error("length assignment: values must be positive");
    if (i > 0 && head[i] > head[i - 1])
      throw domain_error("length assignment: values must be non-increasing");
  }
  if (!head.empty()) {
    Rat next = c * rat_pow(r, static_cast<long long>(head.size()));
    if (next > head.back())
      throw domain_error("length assignment: geometric tail exceeds last explicit value");
  }
}

Rat LengthAssignment::l(long long n) const {
  if (n < 1) throw domain_error("length assignment: index must be at least 1");
  if (n <= static_cast<long long>(head.size())) return head[n - 1];
  return c * rat_pow(r, n - 1);
}

Rat LengthAssignment::tail_total(long long s, long long d) const {
  if (s < 1 || d < 1) throw domain_error("tail_total: bad progression");
  const long long k = static_cast<long long>(head.size());
  Rat sum(0);
  long long n = s;
  for (; n <= k; n += d) sum += head[n - 1];
  // geometric remainder from index n: c r^(n-1) / (1 - r^d)
  sum += c * rat_pow(r, n - 1) / (Rat(1) - rat_pow(r, d));
  return sum;
}

Rat LengthAssignment::tail_partial(long long s, long long d, long long count) const {
  if (s < 1 || d < 1 || count < 0) throw domain_error("tail_partial: bad progression");
  if (count == 0) return Rat(0);
  const long long k = static_cast<long long>(head.size());
  const long long stop = s + count * d;  // exclusive
  // pure geometric part: c r^(s-1) (1 - r^(count d)) / (1 - r^d)
  Rat sum = c * rat_pow(r, s - 1) * (Rat(1) - rat_pow(r, count * d)) /
            (Rat(1) - rat_pow(r, d));
  for (long long n = s; n <= k && n < stop; n += d)
    sum += head[n - 1] - c * rat_pow(r, n - 1);
  return sum;
}

LengthAssignment parse_iota(const std::string& spec) {
  const std::string prefix = "geometric:";
  if (spec.rfind(prefix, 0) != 0)
    throw domain_error("iota spec must start with 'geometric:'");
  LengthAssignment iota;
  bool have_c = false, have_r = false;
  std::stringstream body(spec.substr(prefix.size()));
  std::string field;
  while (std::getline(body, field, ',')) {
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) throw domain_error("bad iota field: '" + field + "'");
    std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "c") {
      iota.c = parse_rat(val);
      have_c = true;
    } else if (key == "r") {
      iota.r = parse_rat(val);
      have_r = true;
    } else if (key == "head") {
      std::stringstream hs(val);
      std::string item;
      while (std::getline(hs, item, '|')) iota.head.push_back(parse_rat(item));
    } else {
      throw domain_error("unknown iota field: '" + key + "'");
    }
  }
  if (!have_c || !have_r) throw domain_error("iota spec needs both c= and r=");
  iota.validate();
  return iota;
}

std::string format_iota(const LengthAssignment& iota) {
  std::string out = "geometric:c=" + rat_str(iota.c) + ",r=" + rat_str(iota.r);
  if (!iota.head.empty()) {
    out += ",head=";
    for (std::size_t i = 0; i < iota.head.size(); ++i) {
      if (i) out += '|';
      out += rat_str(iota.head[i]);
    }
  }
  return out;
}

}  // namespace bigfree
