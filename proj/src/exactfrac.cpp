#include "equidist/exactfrac.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace equidist {

namespace {

constexpr u128 kAllOnes = ~u128(0);

// 53 + 75 = 128, so a double mantissa shifted left this far still fits.
constexpr int kDoubleShift = 75;

u128 round_shift_right(u128 value, int shift) {
  if (shift <= 0) return value;
  if (shift >= 128) {
    // Only the value 2^127 exactly at shift 128 is a tie; mantissas are < 2^53.
    return 0;
  }
  u128 kept = value >> shift;
  u128 rem = value & ((u128(1) << shift) - 1);
  u128 half = u128(1) << (shift - 1);
  if (rem > half || (rem == half && (kept & 1))) ++kept;
  return kept;
}

constexpr std::string_view kGoldenDigits =
    "0.618033988749894848204586834365638117720309179805762862135448622705260462818902449707207204";
constexpr std::string_view kSilverDigits =
    "0.414213562373095048801688724209698078569671875376948073176679737990732478462107038850387534";

}  // namespace

long double UnitFrac::to_long_double() const { return std::ldexp(static_cast<long double>(raw), -128); }

long double SignedResidue::value() const {
  return negative() ? -std::ldexp(static_cast<long double>(u128(0) - u128(raw)), -128)
                    : std::ldexp(static_cast<long double>(u128(raw)), -128);
}

UnitFrac frac_from_real(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("frac_from_real: value outside [0,1)");
  if (r == 0.0) return UnitFrac(0);
  int exp = 0;
  double mant = std::frexp(r, &exp);  // r = mant * 2^exp, mant in [0.5,1)
  auto m = static_cast<u128>(static_cast<std::uint64_t>(std::ldexp(mant, 53)));
  int shift = exp + kDoubleShift;  // raw = m * 2^(exp - 53 + 128)
  if (shift >= 0) return UnitFrac(m << shift);
  return UnitFrac(round_shift_right(m, -shift));
}

UnitFrac frac_from_real_mod1(double r) {
  if (!std::isfinite(r)) throw std::domain_error("frac_from_real_mod1: non-finite value");
  double ip = 0.0;
  double fp = std::modf(std::fabs(r), &ip);  // exact
  UnitFrac f = frac_from_real(fp);
  return r < 0 ? -f : f;
}

WideProduct wide_mul(UnitFrac a, std::int64_t n) {
  const bool neg = n < 0;
  const std::uint64_t mag = neg ? std::uint64_t(0) - static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(n);
  const u128 lo = static_cast<std::uint64_t>(a.raw);
  const u128 hi = static_cast<std::uint64_t>(a.raw >> 64);
  const u128 p_lo = lo * mag;
  const u128 p_hi = hi * mag;
  const u128 mid = (p_lo >> 64) + static_cast<std::uint64_t>(p_hi);
  const u128 low128 = (mid << 64) | static_cast<std::uint64_t>(p_lo);
  const u128 top = (p_hi >> 64) + (mid >> 64);  // < 2^64
  if (!neg) return {static_cast<i128>(top), UnitFrac(low128)};
  if (low128 == 0) return {-static_cast<i128>(top), UnitFrac(0)};
  return {-static_cast<i128>(top) - 1, UnitFrac(u128(0) - low128)};
}

UnitFrac frac_mul_int(UnitFrac a, std::int64_t n) {
  // Low 128 bits of a two's-complement product are the residue mod 2^128.
  return UnitFrac(a.raw * static_cast<u128>(static_cast<i128>(n)));
}

long double dist_nearest_ld(UnitFrac a) {
  u128 d = a.raw <= UnitFrac::kHalf ? a.raw : u128(0) - a.raw;
  return std::ldexp(static_cast<long double>(d), -128);
}

double dist_nearest(UnitFrac a) { return static_cast<double>(dist_nearest_ld(a)); }

SignedResidue nearest_residue(std::int64_t n, UnitFrac a) {
  WideProduct p = wide_mul(a, n);
  SignedResidue r;
  if (p.frac.raw <= UnitFrac::kHalf) {
    r.nearest = static_cast<std::int64_t>(p.integer);
    r.raw = static_cast<i128>(p.frac.raw);
  } else {
    r.nearest = static_cast<std::int64_t>(p.integer + 1);
    r.raw = -static_cast<i128>(u128(0) - p.frac.raw);
  }
  return r;
}

UnitFrac parse_decimal_frac(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty decimal");
  std::size_t dot = s.find('.');
  std::string_view ip = s.substr(0, dot);
  std::string_view fp = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (ip.empty() && fp.empty()) throw std::invalid_argument("malformed decimal: " + std::string(text));
  for (char c : ip)
    if (c != '0') throw std::invalid_argument("decimal outside [0,1): " + std::string(text));
  std::vector<int> digits;
  digits.reserve(fp.size());
  for (char c : fp) {
    if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal: " + std::string(text));
    digits.push_back(c - '0');
  }
  // Binary expansion by repeated doubling of the decimal digit string.
  u128 raw = 0;
  auto next_bit = [&digits]() {
    int carry = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
      int v = digits[i] * 2 + carry;
      digits[i] = v % 10;
      carry = v / 10;
    }
    return carry;
  };
  for (int bit = 0; bit < 128; ++bit) raw = (raw << 1) | static_cast<u128>(next_bit());
  int guard = next_bit();
  bool sticky = std::any_of(digits.begin(), digits.end(), [](int d) { return d != 0; });
  if (guard && (sticky || (raw & 1))) {
    if (raw == kAllOnes) throw std::invalid_argument("decimal rounds up to 1: " + std::string(text));
    ++raw;
  }
  return UnitFrac(raw);
}

UnitFrac parse_hex_frac(std::string_view text) {
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw std::invalid_argument("hex word must start with 0x: " + std::string(text));
  std::string_view h = text.substr(2);
  if (h.size() > 32) throw std::invalid_argument("hex word longer than 128 bits: " + std::string(text));
  u128 raw = 0;
  for (char c : h) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("malformed hex word: " + std::string(text));
    raw = (raw << 4) | static_cast<u128>(v);
  }
  return UnitFrac(raw);
}

std::string to_hex(u128 v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x";
  for (int shift = 124; shift >= 0; shift -= 4) out.push_back(kDigits[static_cast<int>((v >> shift) & 0xf)]);
  return out;
}

std::string to_hex(UnitFrac a) { return to_hex(a.raw); }

std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {out.rbegin(), out.rend()};
}

AlphaVec::AlphaVec(std::vector<UnitFrac> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("AlphaVec needs at least one component");
}

AlphaVec AlphaVec::random(std::uint64_t seed, int d) {
  if (d < 1) throw std::invalid_argument("AlphaVec::random: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<UnitFrac> c;
  c.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    u128 hi = rng();
    u128 lo = rng();
    c.emplace_back((hi << 64) | lo);
  }
  return AlphaVec(std::move(c));
}

UnitFrac golden_frac() { return parse_decimal_frac(kGoldenDigits); }
UnitFrac silver_frac() { return parse_decimal_frac(kSilverDigits); }

}  // namespace equidist
