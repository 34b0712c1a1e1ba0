#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace equidist {

using u128 = unsigned __int128;
using i128 = __int128;

/// A number in [0,1) stored as raw / 2^128. Integer multiples and sums wrap
/// modulo 2^128, which is exactly reduction modulo 1.
struct UnitFrac {
  u128 raw = 0;

  constexpr UnitFrac() = default;
  constexpr explicit UnitFrac(u128 r) : raw(r) {}

  static constexpr u128 kHalf = u128(1) << 127;

  long double to_long_double() const;
  double to_double() const { return static_cast<double>(to_long_double()); }

  friend constexpr UnitFrac operator+(UnitFrac a, UnitFrac b) { return UnitFrac(a.raw + b.raw); }
  friend constexpr UnitFrac operator-(UnitFrac a, UnitFrac b) { return UnitFrac(a.raw - b.raw); }
  constexpr UnitFrac operator-() const { return UnitFrac(u128(0) - raw); }
  constexpr UnitFrac& operator+=(UnitFrac b) {
    raw += b.raw;
    return *this;
  }
  constexpr UnitFrac& operator-=(UnitFrac b) {
    raw -= b.raw;
    return *this;
  }
  friend constexpr bool operator==(UnitFrac a, UnitFrac b) = default;
  friend constexpr auto operator<=>(UnitFrac a, UnitFrac b) { return a.raw <=> b.raw; }
};

/// n·a split into integer part and fractional part, floor semantics.
struct WideProduct {
  i128 integer;   // floor(n·a)
  UnitFrac frac;  // {n·a}
};

/// n·a - nearest with |residue| = ‖n·a‖. Ties (residue exactly 1/2) resolve
/// to residue = +1/2.
struct SignedResidue {
  std::int64_t nearest = 0;
  /// residue · 2^128 in two's complement. A tie (residue +1/2) is stored as
  /// the bit pattern 2^127, which reads as the most negative i128.
  i128 raw = 0;

  bool negative() const { return raw < 0 && u128(raw) != UnitFrac::kHalf; }
  long double value() const;
  /// |residue| as a UnitFrac word (valid because |residue| ≤ 1/2).
  UnitFrac magnitude() const { return UnitFrac(negative() ? u128(0) - u128(raw) : u128(raw)); }
  /// residue reduced mod 1.
  UnitFrac as_frac() const { return UnitFrac(static_cast<u128>(raw)); }
};

/// Round-to-nearest (ties to even) fixed-point image of r. Throws
/// std::domain_error unless 0 <= r < 1.
UnitFrac frac_from_real(double r);

/// Exact image of r mod 1 for any finite r (negative values wrap).
UnitFrac frac_from_real_mod1(double r);

/// {n·a}, exact.
UnitFrac frac_mul_int(UnitFrac a, std::int64_t n);

/// floor(n·a) and {n·a}, exact.
WideProduct wide_mul(UnitFrac a, std::int64_t n);

/// min(a, 1 - a).
double dist_nearest(UnitFrac a);
long double dist_nearest_ld(UnitFrac a);

SignedResidue nearest_residue(std::int64_t n, UnitFrac a);

/// Parse a decimal fraction ("0.6180339887...", ".25", "0") with correct
/// rounding of every supplied digit. Throws std::invalid_argument on
/// malformed input or values outside [0,1).
UnitFrac parse_decimal_frac(std::string_view text);

/// Parse "0x" followed by up to 32 hex digits as a raw word.
UnitFrac parse_hex_frac(std::string_view text);

/// "0x" + 32 lowercase hex digits.
std::string to_hex(UnitFrac a);
std::string to_hex(u128 v);

/// Decimal rendering of an unsigned 128-bit integer.
std::string to_decimal(u128 v);

/// Translation vector α ∈ [0,1)^d, d ≥ 1.
class AlphaVec {
 public:
  AlphaVec() = default;
  explicit AlphaVec(std::vector<UnitFrac> components);

  /// 128 random bits per coordinate from std::mt19937_64(seed), two draws
  /// per coordinate, high word first.
  static AlphaVec random(std::uint64_t seed, int d);

  int dim() const { return static_cast<int>(components_.size()); }
  const UnitFrac& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
  std::span<const UnitFrac> components() const { return components_; }

  friend bool operator==(const AlphaVec&, const AlphaVec&) = default;

 private:
  std::vector<UnitFrac> components_;
};

/// Closed-form 128-bit roundings of classical constants.
UnitFrac golden_frac();      // (√5 - 1)/2
UnitFrac silver_frac();      // √2 - 1

}  // namespace equidist
