#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "equidist/exactfrac.hpp"

namespace equidist {

/// Thrown when a requested point set would exceed the memory budget.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultPointBudget = std::uint64_t(1) << 26;

/// Jitter applied to the target interval (u1, |u1| ≤ 2/N²) and to each
/// summation window (u[i], |u[i]| ≤ 2).
struct WindowShift {
  double u1 = 0.0;
  std::vector<double> u;

  /// Throws std::invalid_argument if any component is outside its range.
  void validate(int d, std::int64_t N) const;
};

/// Integer window for one axis of a shifted sum: the integers k with
/// u < k <= u + N, i.e. first = floor(u) + 1, N consecutive values. With
/// u = 0 this is 1..N.
std::int64_t window_start(double u);

struct PointSet {
  std::vector<UnitFrac> values;
  std::size_t size() const { return values.size(); }
};

/// N^d, or SizeError if it exceeds `budget`.
std::uint64_t checked_point_count(int d, std::int64_t N, std::uint64_t budget);

/// {Σ k_i α_i} over the window of each axis, lexicographic in (k_1..k_d),
/// by incremental exact addition. Generation is split over k_1 blocks.
PointSet generate_points(const AlphaVec& alpha, std::int64_t N, const std::optional<WindowShift>& shift = std::nullopt,
                         std::uint64_t budget = kDefaultPointBudget, int threads = 1);

/// Same values with explicit per-axis window starts (no budget check).
PointSet generate_points_from(const AlphaVec& alpha, std::int64_t N, const std::vector<std::int64_t>& starts,
                              int threads = 1);

/// Counting-only variant: never materializes the point set.
template <class Fn>
void for_each_point(const AlphaVec& alpha, std::int64_t N, const std::vector<std::int64_t>& starts, Fn&& fn) {
  const int d = alpha.dim();
  UnitFrac acc;
  for (int i = 0; i < d; ++i) acc += frac_mul_int(alpha[i], starts[static_cast<std::size_t>(i)]);
  std::vector<UnitFrac> level(static_cast<std::size_t>(d));
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) level[static_cast<std::size_t>(i)] = acc;
  const UnitFrac inner = alpha[d - 1];
  for (;;) {
    UnitFrac v = level[static_cast<std::size_t>(d - 1)];
    for (std::int64_t k = 0; k < N; ++k) {
      fn(v);
      v += inner;
    }
    int axis = d - 2;
    while (axis >= 0) {
      auto a = static_cast<std::size_t>(axis);
      if (++idx[a] < N) {
        level[a] += alpha[axis];
        for (std::size_t j = a + 1; j < static_cast<std::size_t>(d); ++j) level[j] = level[a];
        break;
      }
      idx[a] = 0;
      --axis;
    }
    if (axis < 0) return;
  }
}

/// Number of points with value in [a, b) taken mod 1. b - a = 1 counts
/// everything, b = a counts nothing.
std::uint64_t count_in_interval(const PointSet& points, double a, double b);

/// Interval [start, start + length) on the circle, in exact words. A full
/// circle is flagged separately because its length does not fit in a word.
struct ArcInterval {
  UnitFrac start;
  UnitFrac length;
  bool full = false;

  static ArcInterval from_reals(double a, double b);
  bool contains(UnitFrac y) const { return full || (y - start).raw < length.raw; }
};

/// Little-endian dump of the sorted 128-bit words.
void dump_sorted_points(const PointSet& points, std::ostream& out);

}  // namespace equidist
