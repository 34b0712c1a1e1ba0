#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equidist/exactfrac.hpp"
#include "equidist/phi.hpp"

namespace equidist {

struct FourierParams;
struct LinearFormMask;

// ---------------------------------------------------------------------------
// Small divisors
// ---------------------------------------------------------------------------

/// n·∏‖nα_i‖ from exact residues. Requires n >= 1.
double small_divisor_product(std::int64_t n, const AlphaVec& alpha);
long double small_divisor_product_ld(std::int64_t n, const AlphaVec& alpha);

struct SpectrumRecord {
  int p = 0;
  int v = 0;
  std::uint64_t count = 0;
  double min_product = 0.0;
  std::int64_t argmin = 0;
  double sublemma_ratio = 0.0;  // count / (2^v φ(max(v,1)))
};

/// Buckets S_α(p,v) for 2 <= n <= M:
///   e^{e^{p-1}} <= n < e^{e^p},
///   2^{v-1} <= n∏‖nα_i‖·(log n)^d·φ(max(log log n, 1)) < 2^v.
/// Sorted by (p, v). Requires M <= 10^9.
std::vector<SpectrumRecord> spectrum_scan(const AlphaVec& alpha, std::int64_t M, const PhiSpec& phi, int threads = 1);

/// Double-log bucket p of n (n >= 2).
int spectrum_p(std::int64_t n);

// ---------------------------------------------------------------------------
// Bucket geometry
// ---------------------------------------------------------------------------

enum class Grid { dyadic, geometric };

const char* to_string(Grid g);

/// l = (l_1..l_{d+1}) with sign vector eps ∈ {±1}^{d+1}. With base b the
/// bucket holds n_1 and the nearest residues r_i = n_1 α_i - n_{i+1} with
///   b^{l_1} <= eps_1·n_1 < b^{l_1+1},
///   b^{-l_{i+1}} <= eps_{i+1}·r_i < b^{-l_{i+1}+1}            (i < d),
///   b^{e} <= eps_{d+1}·r_d < b^{e+1},  e = l_2 + ... + l_{d+1} - l_1.
/// The product |n_1|∏|r_i| then lies in [b^{l_{d+1}}, b^{l_{d+1}+d+1}).
struct BucketVec {
  std::vector<int> l;
  std::vector<int> eps;
  Grid grid = Grid::geometric;

  int dim() const { return static_cast<int>(l.size()) - 1; }
  std::string label() const;
  friend bool operator==(const BucketVec&, const BucketVec&) = default;
  friend auto operator<=>(const BucketVec& a, const BucketVec& b) {
    if (auto c = a.l <=> b.l; c != 0) return c;
    return a.eps <=> b.eps;
  }
};

/// Grid constants for one (d, N): the dyadic grid uses base 2, the
/// geometric grid base 1 + δ_N with δ_N = 1/⌈(log N)^d⌉. Both the bucket
/// locator and the membership test compare against power(k), so they agree
/// exactly at bucket edges.
class BucketGeometry {
 public:
  BucketGeometry(Grid grid, int d, std::int64_t N);

  Grid grid() const { return grid_; }
  int dim() const { return d_; }
  std::int64_t N() const { return N_; }
  double delta() const { return delta_; }
  long double base() const { return base_; }
  long double power(long k) const;

  /// Magnitudes m with power(l1) <= m < power(l1+1), as [lo, hi).
  std::pair<std::int64_t, std::int64_t> n1_range(int l1) const;

  /// residues[i] = n_1 α_i - nearest integer, as reals.
  bool contains(const BucketVec& b, std::int64_t n1, std::span<const long double> residues) const;
  std::optional<BucketVec> bucket_of(std::int64_t n1, std::span<const long double> residues) const;

  /// (b - 1)^{d+1}·b^{l_{d+1}}: δ_N^{d+1}(1+δ_N)^{l_{d+1}} on the geometric grid.
  double expected(const BucketVec& b) const;

  /// Index ranges independent of s: l_1 inside L_1(N) (dyadic) or
  /// power(l_1) <= N²/4 (geometric), 0 <= l_{d+1} <= l_1, middle l >= 1.
  bool structurally_valid(const BucketVec& b) const;

  /// Upper edge of every residue interval is at most 1/2.
  bool residue_box_inside(const BucketVec& b) const;

  /// L_2(N): (log N)^s <= b^{l_{d+1}} <= b^{l_1} <= N²/4 and
  /// b^{l_1 - l_{i+1}} >= (log N)^s for i < d.
  bool in_L2(const std::vector<int>& l, int s) const;

 private:
  Grid grid_;
  int d_;
  std::int64_t N_;
  double delta_;
  long double base_;
  long double log_base_;
};

std::vector<std::vector<int>> all_sign_vectors(int d);

struct BoxCountRecord {
  BucketVec bucket;
  std::uint64_t observed = 0;
  double expected = 0.0;
  double relative_error = 0.0;  // NaN when expected == 0
};

/// Exhaustive n_1 scan of each bucket's |n_1| range. Throws
/// std::invalid_argument for buckets that are not structurally valid.
std::vector<BoxCountRecord> box_counts(const AlphaVec& alpha, std::int64_t N, const std::vector<BucketVec>& buckets,
                                       int threads = 1);

/// Cap on the length of a bucket list; longer lists throw SizeError.
inline constexpr std::size_t kMaxBuckets = std::size_t(1) << 21;

/// Geometric buckets with s-independent structural validity, residue box
/// inside [0,1/2] and expected count >= min_expected, in lexicographic
/// order. All sign vectors are included.
std::vector<BucketVec> geometric_buckets(int d, std::int64_t N, double min_expected);

/// Dyadic T-set buckets over L_1(N) with expected count >= min_expected.
std::vector<BucketVec> dyadic_buckets(int d, std::int64_t N, double min_expected);

// ---------------------------------------------------------------------------
// Continued fractions
// ---------------------------------------------------------------------------

struct Convergent {
  u128 p = 0;
  u128 q = 0;
};

struct ContinuedFraction {
  std::vector<u128> quotients;        // a_0; a_1, a_2, ...
  std::vector<Convergent> convergents;
  bool terminated = false;            // expansion of the dyadic value ended
};

/// Expansion of raw/2^128. Requires depth <= 64.
ContinuedFraction continued_fraction(UnitFrac a, int depth);

// ---------------------------------------------------------------------------
// Special lines and ε-big vectors
// ---------------------------------------------------------------------------

/// Neighbor step on the geometric grid: Δl_1 = round(9·log log N / log(1+δ_N)),
/// middle coordinates -Δl_1, last coordinate (d+1)·Δl_1.
std::vector<int> neighbor_step(int d, std::int64_t N);

struct LineEntry {
  std::vector<int> start;
  int length = 0;                       // number of L_2 members on the line
  int occupied = 0;                     // members with a nonempty S(l, ε±) for some pair
  std::vector<std::vector<int>> big;    // positions of ε-big members, one list per sign pair
  int big_total = 0;
};

struct LineCensus {
  std::vector<int> step;
  std::vector<std::vector<int>> pair_signs;  // ε+ of each pair (flip of coordinate 1 gives ε-)
  std::vector<LineEntry> lines;
  int total_big = 0;
  int lines_with_multiple = 0;  // lines with >= 2 ε-big members for one pair
};

/// Desk-scale only (d <= 2, N <= 2^10). Throws SizeError otherwise.
LineCensus line_census(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                       const LinearFormMask& mask, int threads = 1);

}  // namespace equidist
