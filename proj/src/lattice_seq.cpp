#include "equidist/lattice_seq.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "equidist/parallel.hpp"

namespace equidist {

void WindowShift::validate(int d, std::int64_t N) const {
  const double h = 2.0 / (static_cast<double>(N) * static_cast<double>(N));
  if (!(std::fabs(u1) <= h)) throw std::invalid_argument("WindowShift: |u1| exceeds 2/N^2");
  if (static_cast<int>(u.size()) != d) throw std::invalid_argument("WindowShift: need one range shift per axis");
  for (double v : u)
    if (!(std::fabs(v) <= 2.0)) throw std::invalid_argument("WindowShift: range shift outside [-2,2]");
}

std::int64_t window_start(double u) { return static_cast<std::int64_t>(std::floor(u)) + 1; }

std::uint64_t checked_point_count(int d, std::int64_t N, std::uint64_t budget) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::uint64_t m = 1;
  for (int i = 0; i < d; ++i) {
    if (m > budget / static_cast<std::uint64_t>(N))
      throw SizeError("point set N^d exceeds budget of " + std::to_string(budget) + " points");
    m *= static_cast<std::uint64_t>(N);
  }
  return m;
}

PointSet generate_points_from(const AlphaVec& alpha, std::int64_t N, const std::vector<std::int64_t>& starts,
                              int threads) {
  const int d = alpha.dim();
  std::uint64_t inner = 1;
  for (int i = 1; i < d; ++i) inner *= static_cast<std::uint64_t>(N);
  PointSet ps;
  ps.values.resize(static_cast<std::size_t>(inner * static_cast<std::uint64_t>(N)));
  // One block per leading index k_1; each block owns a contiguous slice.
  parallel_blocks(static_cast<std::size_t>(N), threads, [&](std::size_t b) {
    std::vector<std::int64_t> sub = starts;
    sub[0] = starts[0] + static_cast<std::int64_t>(b);
    UnitFrac* out = ps.values.data() + b * inner;
    if (d == 1) {
      *out = frac_mul_int(alpha[0], sub[0]);
      return;
    }
    // Drop the leading axis: fold its fixed contribution into a 1-point offset.
    std::vector<UnitFrac> rest(alpha.components().begin() + 1, alpha.components().end());
    std::vector<std::int64_t> rest_starts(sub.begin() + 1, sub.end());
    const UnitFrac lead = frac_mul_int(alpha[0], sub[0]);
    for_each_point(AlphaVec(std::move(rest)), N, rest_starts, [&](UnitFrac v) { *out++ = v + lead; });
  });
  return ps;
}

PointSet generate_points(const AlphaVec& alpha, std::int64_t N, const std::optional<WindowShift>& shift,
                         std::uint64_t budget, int threads) {
  const int d = alpha.dim();
  checked_point_count(d, N, budget);
  std::vector<std::int64_t> starts(static_cast<std::size_t>(d), 1);
  if (shift) {
    shift->validate(d, N);
    for (int i = 0; i < d; ++i) starts[static_cast<std::size_t>(i)] = window_start(shift->u[static_cast<std::size_t>(i)]);
  }
  return generate_points_from(alpha, N, starts, threads);
}

ArcInterval ArcInterval::from_reals(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("interval endpoints must be finite");
  ArcInterval arc;
  if (b <= a) return arc;  // empty
  const double ia = std::floor(a);
  const double ib = std::floor(b);
  arc.start = frac_from_real_mod1(a);
  const UnitFrac end = frac_from_real_mod1(b);
  const double whole = ib - ia;
  if (whole >= 2.0 || (whole == 1.0 && end >= arc.start)) {
    arc.full = true;
    return arc;
  }
  arc.length = end - arc.start;
  return arc;
}

std::uint64_t count_in_interval(const PointSet& points, double a, double b) {
  const ArcInterval arc = ArcInterval::from_reals(a, b);
  if (arc.full) return points.size();
  std::uint64_t c = 0;
  for (const UnitFrac& y : points.values) c += arc.contains(y) ? 1 : 0;
  return c;
}

void dump_sorted_points(const PointSet& points, std::ostream& out) {
  std::vector<UnitFrac> sorted = points.values;
  std::sort(sorted.begin(), sorted.end());
  for (const UnitFrac& y : sorted) {
    unsigned char buf[16];
    u128 v = y.raw;
    for (unsigned char& byte : buf) {
      byte = static_cast<unsigned char>(v & 0xff);
      v >>= 8;
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(buf));
  }
}

}  // namespace equidist
