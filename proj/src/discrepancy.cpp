#include "equidist/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "equidist/parallel.hpp"
#include "equidist/summation.hpp"

namespace equidist {

namespace {

long double signed_value(UnitFrac y) {
  if (y.raw <= UnitFrac::kHalf) return std::ldexp(static_cast<long double>(y.raw), -128);
  return -std::ldexp(static_cast<long double>(u128(0) - y.raw), -128);
}

// Roof mass of {u1 ∈ [-h,h] : (y - u1) mod 1 ∈ [0, x)} for x ∈ (0,1).
double hit_mass(UnitFrac y, UnitFrac xw, double x, double h) {
  const long double c = signed_value(y);
  const long double e = signed_value(y - xw);
  const double fc = roof_cdf(static_cast<double>(c), h);
  const double fe = roof_cdf(static_cast<double>(e), h);
  if (c - static_cast<long double>(x) > -0.5L) return fc - fe;
  return 1.0 + fc - fe;
}

std::vector<std::vector<int>> window_offsets(int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(d), -2);
  for (;;) {
    out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == 1) cur[static_cast<std::size_t>(i--)] = -2;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  return out;
}

double window_weight(const std::vector<int>& offsets) {
  double w = 1.0;
  for (int j : offsets) w *= kWindowWeights[j + 2];
  return w;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t count_sorted(const std::vector<UnitFrac>& sorted, const ArcInterval& arc) {
  if (arc.full) return sorted.size();
  if (arc.length.raw == 0) return 0;
  const UnitFrac end = arc.start + arc.length;
  auto lb = [&](UnitFrac v) { return static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()); };
  if (end.raw > arc.start.raw || end.raw == 0) {
    std::uint64_t hi = end.raw == 0 ? sorted.size() : lb(end);
    return hi - lb(arc.start);
  }
  return (sorted.size() - lb(arc.start)) + lb(end);
}

}  // namespace

const char* to_string(JumpSide side) { return side == JumpSide::left_limit ? "left-limit" : "right-limit"; }

double roof_cdf(double t, double h) {
  if (t <= -h) return 0.0;
  if (t >= h) return 1.0;
  if (t <= 0.0) {
    double s = (t + h) / h;
    return 0.5 * s * s;
  }
  double s = (h - t) / h;
  return 1.0 - 0.5 * s * s;
}

namespace {

// hi + lo/2^128 rounded once to double.
double fixed_to_double(std::uint64_t hi, u128 lo) {
  if (hi == 0) return std::ldexp(static_cast<double>(lo), -128);
  const int s = 64 - __builtin_clzll(hi);
  u128 w = (u128(hi) << (128 - s)) | (lo >> s);
  if ((lo & ((u128(1) << s) - 1)) != 0) w |= 1;  // sticky
  return std::ldexp(static_cast<double>(w), s - 128);
}

}  // namespace

double jump_value(std::uint64_t count, UnitFrac y, std::uint64_t M) {
  WideProduct p = wide_mul(y, static_cast<std::int64_t>(M));
  const i128 diff = static_cast<i128>(count) - p.integer;
  // count - M y = diff - f with f = p.frac in [0,1).
  if (diff > 0) {
    if (p.frac.raw == 0) return static_cast<double>(diff);
    return fixed_to_double(static_cast<std::uint64_t>(diff - 1), u128(0) - p.frac.raw);
  }
  return -fixed_to_double(static_cast<std::uint64_t>(-diff), p.frac.raw);
}

double discrepancy_at(const AlphaVec& alpha, double x, std::int64_t N, std::uint64_t budget, int threads) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("discrepancy_at: x must lie in [0,1]");
  PointSet pts = generate_points(alpha, N, std::nullopt, budget, threads);
  const std::uint64_t hits = count_in_interval(pts, 0.0, x);
  return static_cast<double>(hits) - static_cast<double>(pts.size()) * x;
}

void sort_words(std::vector<UnitFrac>& words) {
  const std::size_t n = words.size();
  if (n < 2) return;
  std::vector<UnitFrac> buf(n);
  std::vector<std::size_t> counts(1u << 16);
  UnitFrac* src = words.data();
  UnitFrac* dst = buf.data();
  for (int pass = 0; pass < 4; ++pass) {
    const int shift = 64 + 16 * pass;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>((src[i].raw >> shift) & 0xffff)];
    std::size_t total = 0;
    for (auto& c : counts) {
      std::size_t t = c;
      c = total;
      total += t;
    }
    for (std::size_t i = 0; i < n; ++i) dst[counts[static_cast<std::size_t>((src[i].raw >> shift) & 0xffff)]++] = src[i];
    std::swap(src, dst);
  }
  // Four passes leave the sorted data back in `words`.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    const auto hi = static_cast<std::uint64_t>(words[i].raw >> 64);
    while (j < n && static_cast<std::uint64_t>(words[j].raw >> 64) == hi) ++j;
    if (j - i > 1) std::sort(words.begin() + static_cast<std::ptrdiff_t>(i), words.begin() + static_cast<std::ptrdiff_t>(j));
    i = j;
  }
}

DiscrepancyResult max_discrepancy_sorted(std::span<const UnitFrac> sorted) {
  DiscrepancyResult r;
  const std::uint64_t M = sorted.size();
  r.points = M;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t j = 1; j <= M; ++j) {
    const UnitFrac y = sorted[j - 1];
    const double right = jump_value(j, y, M);          // j - M·y
    const double left = -jump_value(j - 1, y, M);      // M·y - (j-1)
    if (right > best) {
      best = right;
      r.side = JumpSide::right_limit;
      r.jump_index = j;
      r.argmax_word = y;
    }
    if (left > best) {
      best = left;
      r.side = JumpSide::left_limit;
      r.jump_index = j;
      r.argmax_word = y;
    }
  }
  r.delta = M == 0 ? 0.0 : best;
  r.argmax_x = r.argmax_word.to_double();
  return r;
}

DiscrepancyResult max_discrepancy(const AlphaVec& alpha, std::int64_t N, std::uint64_t budget, int threads) {
  PointSet pts = generate_points(alpha, N, std::nullopt, budget, threads);
  sort_words(pts.values);
  return max_discrepancy_sorted(pts.values);
}

double oscillated_discrepancy(const AlphaVec& alpha, double a, double b, std::span<const double> u, std::int64_t N,
                              std::uint64_t budget) {
  const int d = alpha.dim();
  if (static_cast<int>(u.size()) != d) throw std::invalid_argument("oscillated_discrepancy: need one shift per axis");
  if (!(b - a >= 0.0 && b - a <= 1.0)) throw std::invalid_argument("oscillated_discrepancy: need 0 <= b-a <= 1");
  for (double v : u)
    if (!(std::fabs(v) <= 2.0)) throw std::invalid_argument("oscillated_discrepancy: range shift outside [-2,2]");
  const std::uint64_t M = checked_point_count(d, N, budget);
  std::vector<std::int64_t> starts;
  for (double v : u) starts.push_back(window_start(v));
  const ArcInterval arc = ArcInterval::from_reals(a, b);
  std::uint64_t hits = 0;
  for_each_point(alpha, N, starts, [&](UnitFrac y) { hits += arc.contains(y) ? 1 : 0; });
  return static_cast<double>(hits) - static_cast<double>(M) * (b - a);
}

double roof_weight_total(int d, std::int64_t N) {
  const double h = 2.0 / (static_cast<double>(N) * static_cast<double>(N));
  const double interval_mass = roof_cdf(h, h) - roof_cdf(-h, h);
  CompensatedSum total;
  for (const auto& offs : window_offsets(d)) total.add(window_weight(offs) * interval_mass);
  return total.value();
}

AveragedResult averaged_discrepancy_direct(const AlphaVec& alpha, double x, std::int64_t N, const AverageOptions& opts,
                                           int threads) {
  const int d = alpha.dim();
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("averaged_discrepancy_direct: x must lie in [0,1]");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  const double h = 2.0 / (static_cast<double>(N) * static_cast<double>(N));
  const std::uint64_t M = checked_point_count(d, N, kDefaultPointBudget);
  const double expected = static_cast<double>(M) * x;
  const auto offsets = window_offsets(d);
  AveragedResult out;

  if (opts.mode == AverageMode::exact_sweep) {
    if (d > 2 || N > 64) throw std::invalid_argument("exact-sweep is limited to d <= 2 and N <= 64");
    const UnitFrac xw = x < 1.0 ? frac_from_real(x) : UnitFrac(0);
    std::vector<CompensatedSum> partial(offsets.size());
    parallel_blocks(offsets.size(), threads, [&](std::size_t w) {
      std::vector<std::int64_t> starts;
      for (int j : offsets[w]) starts.push_back(j + 1);
      CompensatedSum mass;
      for_each_point(alpha, N, starts, [&](UnitFrac y) {
        if (x >= 1.0) mass.add(1.0);
        else if (x > 0.0) mass.add(hit_mass(y, xw, x, h));
      });
      partial[w].add(window_weight(offsets[w]) * mass.value());
    });
    CompensatedSum total;
    for (const auto& p : partial) total.merge(p);
    total.add(-expected);
    out.value = total.value();
    out.evaluations = M * offsets.size();
    out.error_bound = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(out.evaluations + M);
    return out;
  }

  if (opts.samples < 2) throw std::invalid_argument("monte-carlo needs at least 2 samples");
  std::vector<std::vector<UnitFrac>> sorted(offsets.size());
  for (std::size_t w = 0; w < offsets.size(); ++w) {
    std::vector<std::int64_t> starts;
    for (int j : offsets[w]) starts.push_back(j + 1);
    sorted[w] = generate_points_from(alpha, N, starts).values;
    sort_words(sorted[w]);
  }
  constexpr std::uint64_t kBlock = 1u << 16;
  const std::uint64_t blocks = (opts.samples + kBlock - 1) / kBlock;
  std::vector<CompensatedSum> sum(blocks), sumsq(blocks);
  parallel_blocks(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    const std::uint64_t begin = b * kBlock;
    const std::uint64_t end = std::min(opts.samples, begin + kBlock);
    for (std::uint64_t s = begin; s < end; ++s) {
      const double u1 = h * (uniform01(rng) - uniform01(rng));
      std::size_t w = 0;
      for (int i = 0; i < d; ++i) {
        const double ui = 2.0 * (uniform01(rng) - uniform01(rng));
        const int j = std::clamp(static_cast<int>(std::floor(ui)), -2, 1);
        w = w * 4 + static_cast<std::size_t>(j + 2);
      }
      const double v = static_cast<double>(count_sorted(sorted[w], ArcInterval::from_reals(u1, x + u1))) - expected;
      sum[b].add(v);
      sumsq[b].add(v * v);
    }
  });
  CompensatedSum s1, s2;
  for (std::size_t b = 0; b < blocks; ++b) {
    s1.merge(sum[b]);
    s2.merge(sumsq[b]);
  }
  const double n = static_cast<double>(opts.samples);
  const double mean = s1.value() / n;
  const double var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
  out.value = mean;
  out.error_bound = 3.0 * std::sqrt(var / n);
  out.evaluations = opts.samples;
  return out;
}

}  // namespace equidist
