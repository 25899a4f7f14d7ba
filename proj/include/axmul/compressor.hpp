#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace axmul {

using Rational = boost::rational<std::int64_t>;

/// Renders a rational as a decimal string. Terminating expansions are printed
/// exactly; everything else is rounded half-up to `max_digits` places.
inline std::string to_decimal(const Rational& r, int max_digits = 6) {
  using I128 = __int128;
  bool neg = r < Rational(0);
  I128 num = neg ? -r.numerator() : r.numerator();
  I128 den = r.denominator();
  I128 ip = num / den;
  I128 rem = num % den;
  std::string digits;
  for (int i = 0; i < max_digits && rem != 0; ++i) {
    rem *= 10;
    digits.push_back(static_cast<char>('0' + static_cast<int>(rem / den)));
    rem %= den;
  }
  if (rem != 0) {  // round half-up on the first dropped digit
    if ((rem * 2) >= den) {
      int i = static_cast<int>(digits.size()) - 1;
      for (; i >= 0; --i) {
        if (digits[i] != '9') { ++digits[i]; break; }
        digits[i] = '0';
      }
      if (i < 0) ++ip;
    }
  }
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  std::string out = neg ? "-" : "";
  // stringify the integer part of an __int128 by hand
  std::string ipart;
  if (ip == 0) ipart = "0";
  for (; ip != 0; ip /= 10) ipart.insert(ipart.begin(), static_cast<char>('0' + static_cast<int>(ip % 10)));
  out += ipart;
  if (!digits.empty()) out += "." + digits;
  return out;
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// ---------------------------------------------------------------------------
// Compressor primitives
// ---------------------------------------------------------------------------

/// The compressor family: four exact building blocks plus the multicolumn
/// inexact compressor and its seven derivatives. An `X,Y:2` kind takes X bits
/// from the higher column (weight 2^(k+1)) and Y bits from the lower (2^k).
enum class CompressorKind {
  HALF_ADDER,
  FULL_ADDER,
  EXACT_4_2,
  EXACT_6_2,
  C_3_3_2,
  C_3_3_2_NOCIN,
  C_3_2_2_NOCIN,
  C_2_3_2,
  C_2_2_2,
  C_1_3_2,
  C_1_2_2,
  C_1_2_2_NOCIN,
};

constexpr std::array<CompressorKind, 12> kAllKinds = {
    CompressorKind::HALF_ADDER,    CompressorKind::FULL_ADDER,
    CompressorKind::EXACT_4_2,     CompressorKind::EXACT_6_2,
    CompressorKind::C_3_3_2,       CompressorKind::C_3_3_2_NOCIN,
    CompressorKind::C_3_2_2_NOCIN, CompressorKind::C_2_3_2,
    CompressorKind::C_2_2_2,       CompressorKind::C_1_3_2,
    CompressorKind::C_1_2_2,       CompressorKind::C_1_2_2_NOCIN,
};

constexpr std::array<CompressorKind, 8> kInexactKinds = {
    CompressorKind::C_3_3_2, CompressorKind::C_3_3_2_NOCIN,
    CompressorKind::C_3_2_2_NOCIN, CompressorKind::C_2_3_2,
    CompressorKind::C_2_2_2, CompressorKind::C_1_3_2,
    CompressorKind::C_1_2_2, CompressorKind::C_1_2_2_NOCIN,
};

/// Static shape of a compressor. `m_high` inputs sit at weight 2^(k+1),
/// `m_low` at 2^k, carries-in at 2^k. Outputs are Sum at 2^k, Carry at
/// 2^(k+1) and, when present, carries-out at 2^(k + cout_rel_col).
struct CompressorSpec {
  CompressorKind kind;
  std::string_view name;
  int m_high;
  int m_low;
  int cin_count;
  int cout_count;
  int cout_rel_col;  // 2 for the multicolumn family, 1 for the 4:2/6:2 chains
  bool is_exact;

  int columns() const { return m_high > 0 ? 2 : 1; }  // L
  int input_bits() const { return m_high + m_low + cin_count; }
  /// Denominator of the NED definition: all inputs high, all outputs low.
  int max_input_value() const { return 2 * m_high + m_low + cin_count; }
};

inline const CompressorSpec& spec_of(CompressorKind kind) {
  static const std::array<CompressorSpec, 12> table = {{
      {CompressorKind::HALF_ADDER, "HALF_ADDER", 0, 2, 0, 0, 0, true},
      {CompressorKind::FULL_ADDER, "FULL_ADDER", 0, 2, 1, 0, 0, true},
      {CompressorKind::EXACT_4_2, "EXACT_4_2", 0, 4, 1, 1, 1, true},
      {CompressorKind::EXACT_6_2, "EXACT_6_2", 0, 6, 3, 3, 1, true},
      {CompressorKind::C_3_3_2, "C_3_3_2", 3, 3, 1, 1, 2, false},
      {CompressorKind::C_3_3_2_NOCIN, "C_3_3_2_NOCIN", 3, 3, 0, 1, 2, false},
      {CompressorKind::C_3_2_2_NOCIN, "C_3_2_2_NOCIN", 3, 2, 0, 1, 2, false},
      {CompressorKind::C_2_3_2, "C_2_3_2", 2, 3, 1, 1, 2, false},
      {CompressorKind::C_2_2_2, "C_2_2_2", 2, 2, 1, 1, 2, false},
      {CompressorKind::C_1_3_2, "C_1_3_2", 1, 3, 1, 0, 0, false},
      {CompressorKind::C_1_2_2, "C_1_2_2", 1, 2, 1, 0, 0, false},
      {CompressorKind::C_1_2_2_NOCIN, "C_1_2_2_NOCIN", 1, 2, 0, 0, 0, false},
  }};
  return table[static_cast<std::size_t>(kind)];
}

inline std::string kind_name(CompressorKind kind) { return std::string(spec_of(kind).name); }

inline CompressorKind kind_from_name(std::string_view name) {
  for (CompressorKind k : kAllKinds)
    if (spec_of(k).name == name) return k;
  throw std::invalid_argument("unknown compressor kind: " + std::string(name));
}

struct CompressorOutput {
  bool sum = false;
  bool carry = false;
  int cout_count = 0;
  std::array<bool, 3> cout{};  // valid up to cout_count

  /// Output value in units of the anchor weight 2^k.
  int value(const CompressorSpec& s) const {
    int v = (sum ? 1 : 0) + (carry ? 2 : 0);
    int cw = 1 << s.cout_rel_col;
    for (int i = 0; i < cout_count; ++i) v += cout[i] ? cw : 0;
    return v;
  }
};

using Bits = std::vector<int>;

inline int popsum(const Bits& bits) {
  int s = 0;
  for (int b : bits) s += b ? 1 : 0;
  return s;
}

/// Sum of input variables relative to the anchor column (Sigma_in).
inline int input_value(const CompressorSpec& s, const Bits& b_bits, const Bits& a_bits,
                       const Bits& cins) {
  if (static_cast<int>(b_bits.size()) != s.m_high ||
      static_cast<int>(a_bits.size()) != s.m_low ||
      static_cast<int>(cins.size()) != s.cin_count)
    throw std::invalid_argument(std::string("arity mismatch for ") + std::string(s.name));
  return 2 * popsum(b_bits) + popsum(a_bits) + popsum(cins);
}

inline int input_value(CompressorKind kind, const Bits& b_bits, const Bits& a_bits,
                       const Bits& cins = {}) {
  return input_value(spec_of(kind), b_bits, a_bits, cins);
}

namespace detail {
// (carry, sum) of up to three equally weighted bits: pass-through, half
// adder or full adder depending on arity.
inline std::pair<int, int> compress_side(const Bits& bits) {
  switch (bits.size()) {
    case 0: return {0, 0};
    case 1: return {0, bits[0] & 1};
    case 2: return {bits[0] & bits[1] & 1, (bits[0] ^ bits[1]) & 1};
    case 3: {
      int x = bits[0] & 1, y = bits[1] & 1, z = bits[2] & 1;
      return {(x & y) | (x & z) | (y & z), x ^ y ^ z};
    }
    default: throw std::invalid_argument("side arity > 3");
  }
}
}  // namespace detail

/// Evaluates one compressor on concrete bits.
///
/// Inexact kinds follow the canonical realization: each side is reduced by a
/// full adder / half adder / wire, the carry-in is folded into the low side
/// with a half adder, and the collision of the three weight-2 signals is
/// absorbed by an OR. Exact kinds are textbook adders/compressors.
inline CompressorOutput eval(CompressorKind kind, const Bits& b_bits, const Bits& a_bits,
                             const Bits& cins = {}) {
  const CompressorSpec& s = spec_of(kind);
  (void)input_value(s, b_bits, a_bits, cins);  // arity check

  CompressorOutput out;
  if (s.is_exact) {
    switch (kind) {
      case CompressorKind::HALF_ADDER: {
        auto [c, sum] = detail::compress_side(a_bits);
        out.sum = sum;
        out.carry = c;
        return out;
      }
      case CompressorKind::FULL_ADDER: {
        auto [c, sum] = detail::compress_side({a_bits[0], a_bits[1], cins[0]});
        out.sum = sum;
        out.carry = c;
        return out;
      }
      case CompressorKind::EXACT_4_2: {
        auto [cout0, s1] = detail::compress_side({a_bits[0], a_bits[1], a_bits[2]});
        auto [carry, sum] = detail::compress_side({s1, a_bits[3], cins[0]});
        out.sum = sum;
        out.carry = carry;
        out.cout_count = 1;
        out.cout[0] = cout0;
        return out;
      }
      case CompressorKind::EXACT_6_2: {
        auto [c1, s1] = detail::compress_side({a_bits[0], a_bits[1], a_bits[2]});
        auto [c2, s2] = detail::compress_side({a_bits[3], a_bits[4], a_bits[5]});
        auto [c3, s3] = detail::compress_side({s1, s2, cins[0]});
        auto [carry, sum] = detail::compress_side({s3, cins[1], cins[2]});
        out.sum = sum;
        out.carry = carry;
        out.cout_count = 3;
        out.cout = {static_cast<bool>(c1), static_cast<bool>(c2), static_cast<bool>(c3)};
        return out;
      }
      default: break;
    }
  }

  auto [c_a, s_a] = detail::compress_side(a_bits);
  int c2 = 0, sum = s_a;
  if (s.cin_count == 1) {
    c2 = s_a & cins[0];
    sum = s_a ^ cins[0];
  }
  auto [c_b, s_b] = detail::compress_side(b_bits);
  out.sum = sum;
  out.carry = (s_b | c_a | c2) != 0;
  if (s.m_high >= 2) {
    out.cout_count = 1;
    out.cout[0] = c_b != 0;
  }
  return out;
}

/// Signed error distance of one evaluation; follows the truth table's sign
/// convention (inexact minus exact), so inexact kinds never go positive.
inline int error_distance(CompressorKind kind, const Bits& b_bits, const Bits& a_bits,
                          const Bits& cins = {}) {
  const CompressorSpec& s = spec_of(kind);
  return eval(kind, b_bits, a_bits, cins).value(s) - input_value(s, b_bits, a_bits, cins);
}

// ---------------------------------------------------------------------------
// Exhaustive per-compressor error statistics
// ---------------------------------------------------------------------------

struct CompressorErrorStats {
  Rational med_c{0};
  Rational ned_c{0};
  Rational error_rate{0};
  int max_abs_ed = 0;
  std::map<int, Rational> ed_histogram;  // signed ED -> probability mass
};

/// Enumerates every input combination (equiprobable) with exact arithmetic.
inline CompressorErrorStats compressor_error_stats(CompressorKind kind) {
  const CompressorSpec& s = spec_of(kind);
  const int n = s.input_bits();
  const std::int64_t total = std::int64_t{1} << n;

  std::map<int, std::int64_t> counts;
  std::int64_t abs_sum = 0, err_cnt = 0;
  int max_abs = 0;
  for (std::int64_t mask = 0; mask < total; ++mask) {
    Bits b(s.m_high), a(s.m_low), c(s.cin_count);
    int bit = 0;
    for (int i = 0; i < s.m_high; ++i) b[i] = (mask >> bit++) & 1;
    for (int i = 0; i < s.m_low; ++i) a[i] = (mask >> bit++) & 1;
    for (int i = 0; i < s.cin_count; ++i) c[i] = (mask >> bit++) & 1;
    int ed = error_distance(kind, b, a, c);
    counts[ed]++;
    abs_sum += std::abs(ed);
    if (ed != 0) err_cnt++;
    max_abs = std::max(max_abs, std::abs(ed));
  }

  CompressorErrorStats st;
  st.med_c = Rational(abs_sum, total);
  st.ned_c = st.med_c / Rational(s.max_input_value());
  st.error_rate = Rational(err_cnt, total);
  st.max_abs_ed = max_abs;
  for (auto& [ed, cnt] : counts) st.ed_histogram[ed] = Rational(cnt, total);
  return st;
}

// ---------------------------------------------------------------------------
// Figures of merit
// ---------------------------------------------------------------------------

struct FigureOfMerit {
  double fom1 = 0.0;
  double fom2 = 0.0;
};

/// FOM_1 = Delay / (log M - log N) with M counting every input bit including
/// carries-in and N = 2 output digits; FOM_2 = Delay*Power / (1 - NED_C).
/// Logarithms are base 10.
inline FigureOfMerit figures_of_merit(CompressorKind kind, double delay, double power) {
  const CompressorSpec& s = spec_of(kind);
  if (delay <= 0 || power <= 0) throw std::invalid_argument("delay and power must be positive");
  const int m = s.input_bits();
  const int n = 2;
  if (m <= n) throw std::domain_error("FOM_1 requires M > N");
  FigureOfMerit f;
  f.fom1 = delay / (std::log10(static_cast<double>(m)) - std::log10(static_cast<double>(n)));
  Rational ned = compressor_error_stats(kind).ned_c;
  if (ned >= Rational(1)) {
    f.fom2 = std::numeric_limits<double>::infinity();
  } else {
    f.fom2 = delay * power / (1.0 - to_double(ned));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Truth table (one row per concrete input combination)
// ---------------------------------------------------------------------------

struct TruthRow {
  Bits b, a, cins;
  int sum_in = 0;       // Sigma_in
  CompressorOutput out;
  int ed = 0;
};

inline std::vector<TruthRow> truth_table(CompressorKind kind) {
  const CompressorSpec& s = spec_of(kind);
  const int n = s.input_bits();
  std::vector<TruthRow> rows;
  rows.reserve(std::size_t{1} << n);
  for (std::int64_t mask = 0; mask < (std::int64_t{1} << n); ++mask) {
    TruthRow r;
    r.b.resize(s.m_high);
    r.a.resize(s.m_low);
    r.cins.resize(s.cin_count);
    int bit = 0;
    for (int i = 0; i < s.m_high; ++i) r.b[i] = (mask >> bit++) & 1;
    for (int i = 0; i < s.m_low; ++i) r.a[i] = (mask >> bit++) & 1;
    for (int i = 0; i < s.cin_count; ++i) r.cins[i] = (mask >> bit++) & 1;
    r.sum_in = input_value(s, r.b, r.a, r.cins);
    r.out = eval(kind, r.b, r.a, r.cins);
    r.ed = r.out.value(s) - r.sum_in;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace axmul
