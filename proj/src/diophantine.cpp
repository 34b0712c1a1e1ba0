#include "equidist/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "equidist/fourier_decomp.hpp"
#include "equidist/lattice_seq.hpp"
#include "equidist/parallel.hpp"
#include "equidist/summation.hpp"

namespace equidist {

namespace {

constexpr std::int64_t kScanBlock = std::int64_t(1) << 16;

// v for a zero product (rational α): sorts below every real band.
constexpr int kZeroBand = std::numeric_limits<int>::min() / 2;

long double log_power(std::int64_t N, int s) { return std::pow(std::log(static_cast<long double>(N)), s); }

}  // namespace

// ---------------------------------------------------------------------------
// Small divisors
// ---------------------------------------------------------------------------

long double small_divisor_product_ld(std::int64_t n, const AlphaVec& alpha) {
  if (n < 1) throw std::invalid_argument("small_divisor_product: n must be >= 1");
  long double p = static_cast<long double>(n);
  for (int i = 0; i < alpha.dim(); ++i) p *= std::fabs(nearest_residue(n, alpha[i]).value());
  return p;
}

double small_divisor_product(std::int64_t n, const AlphaVec& alpha) {
  return static_cast<double>(small_divisor_product_ld(n, alpha));
}

int spectrum_p(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("spectrum_p: n must be >= 2");
  const long double ll = std::log(std::log(static_cast<long double>(n)));
  int p = static_cast<int>(std::floor(ll)) + 1;
  // e^{e^{p-1}} <= n < e^{e^p}
  while (p > -64 && std::exp(std::exp(static_cast<long double>(p - 1))) > static_cast<long double>(n)) --p;
  while (std::exp(std::exp(static_cast<long double>(p))) <= static_cast<long double>(n)) ++p;
  return p;
}

std::vector<SpectrumRecord> spectrum_scan(const AlphaVec& alpha, std::int64_t M, const PhiSpec& phi, int threads) {
  if (M > 1'000'000'000) throw SizeError("spectrum_scan: M must be <= 10^9");
  if (M < 2) return {};
  const int d = alpha.dim();
  using Key = std::pair<int, int>;
  const std::int64_t count = M - 1;
  const auto blocks = static_cast<std::size_t>((count + kScanBlock - 1) / kScanBlock);
  std::vector<std::map<Key, SpectrumRecord>> partial(blocks);
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    auto& out = partial[b];
    const std::int64_t first = 2 + static_cast<std::int64_t>(b) * kScanBlock;
    const std::int64_t last = std::min(M, first + kScanBlock - 1);
    for (std::int64_t n = first; n <= last; ++n) {
      const long double prod = small_divisor_product_ld(n, alpha);
      const int p = spectrum_p(n);
      const long double logn = std::log(static_cast<long double>(n));
      const double ll = static_cast<double>(std::log(logn));
      int v = kZeroBand;
      if (prod > 0) {
        const long double h = prod * std::pow(logn, d) * phi(std::max(ll, 1.0));
        v = static_cast<int>(std::floor(std::log2(h))) + 1;
        // 2^{v-1} <= h < 2^v
        while (std::ldexp(1.0L, v - 1) > h) --v;
        while (std::ldexp(1.0L, v) <= h) ++v;
      }
      auto [it, fresh] = out.try_emplace(Key{p, v});
      SpectrumRecord& r = it->second;
      if (fresh) {
        r.p = p;
        r.v = v;
        r.min_product = static_cast<double>(prod);
        r.argmin = n;
      } else if (static_cast<double>(prod) < r.min_product) {
        r.min_product = static_cast<double>(prod);
        r.argmin = n;
      }
      ++r.count;
    }
  });
  std::map<Key, SpectrumRecord> merged;
  for (auto& part : partial) {
    for (auto& [key, rec] : part) {
      auto [it, fresh] = merged.try_emplace(key, rec);
      if (fresh) continue;
      SpectrumRecord& r = it->second;
      r.count += rec.count;
      if (rec.min_product < r.min_product) {
        r.min_product = rec.min_product;
        r.argmin = rec.argmin;
      }
    }
  }
  std::vector<SpectrumRecord> out;
  out.reserve(merged.size());
  for (auto& [key, rec] : merged) {
    if (rec.v != kZeroBand) {
      const double denom = std::ldexp(1.0, rec.v) * phi(std::max(static_cast<double>(rec.v), 1.0));
      rec.sublemma_ratio = static_cast<double>(rec.count) / denom;
    } else {
      rec.sublemma_ratio = std::numeric_limits<double>::infinity();
    }
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bucket geometry
// ---------------------------------------------------------------------------

const char* to_string(Grid g) { return g == Grid::dyadic ? "dyadic" : "geometric"; }

std::string BucketVec::label() const {
  std::string out = "l=(";
  for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "," : "") + std::to_string(l[i]);
  out += ") eps=(";
  for (std::size_t i = 0; i < eps.size(); ++i) out += std::string(i ? "," : "") + (eps[i] > 0 ? "+" : "-");
  return out + ")";
}

BucketGeometry::BucketGeometry(Grid grid, int d, std::int64_t N) : grid_(grid), d_(d), N_(N) {
  if (d < 1) throw std::invalid_argument("bucket geometry: d must be >= 1");
  if (N < 2) throw std::invalid_argument("bucket geometry: N must be >= 2");
  if (grid == Grid::dyadic) {
    delta_ = 1.0;
  } else {
    const double l = std::pow(std::log(static_cast<double>(N)), d);
    delta_ = 1.0 / std::ceil(l);
  }
  base_ = 1.0L + static_cast<long double>(delta_);
  log_base_ = std::log(base_);
}

long double BucketGeometry::power(long k) const {
  if (grid_ == Grid::dyadic) return std::ldexp(1.0L, static_cast<int>(k));
  return std::exp(static_cast<long double>(k) * log_base_);
}

namespace {

// Largest k with geom.power(k) <= v (v > 0).
long floor_log(const BucketGeometry& geom, long double v, long double log_base) {
  long k = static_cast<long>(std::floor(std::log(v) / log_base));
  while (geom.power(k) > v) --k;
  while (geom.power(k + 1) <= v) ++k;
  return k;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> BucketGeometry::n1_range(int l1) const {
  const auto lo = static_cast<std::int64_t>(std::ceil(power(l1)));
  const auto hi = static_cast<std::int64_t>(std::ceil(power(l1 + 1)));
  return {lo, std::max(lo, hi)};
}

bool BucketGeometry::contains(const BucketVec& b, std::int64_t n1, std::span<const long double> residues) const {
  if (b.dim() != d_ || static_cast<int>(residues.size()) != d_) return false;
  const long double m = static_cast<long double>(b.eps[0]) * static_cast<long double>(n1);
  if (!(power(b.l[0]) <= m && m < power(b.l[0] + 1))) return false;
  long e = b.l[static_cast<std::size_t>(d_)] - b.l[0];
  for (int i = 0; i < d_ - 1; ++i) {
    const long li = b.l[static_cast<std::size_t>(i + 1)];
    e += li;
    const long double r = static_cast<long double>(b.eps[static_cast<std::size_t>(i + 1)]) * residues[static_cast<std::size_t>(i)];
    if (!(power(-li) <= r && r < power(-li + 1))) return false;
  }
  const long double r = static_cast<long double>(b.eps[static_cast<std::size_t>(d_)]) * residues[static_cast<std::size_t>(d_ - 1)];
  return power(e) <= r && r < power(e + 1);
}

std::optional<BucketVec> BucketGeometry::bucket_of(std::int64_t n1, std::span<const long double> residues) const {
  if (n1 == 0 || static_cast<int>(residues.size()) != d_) return std::nullopt;
  BucketVec b;
  b.grid = grid_;
  b.l.resize(static_cast<std::size_t>(d_ + 1));
  b.eps.resize(static_cast<std::size_t>(d_ + 1));
  b.eps[0] = n1 > 0 ? 1 : -1;
  const long l1 = floor_log(*this, std::fabs(static_cast<long double>(n1)), log_base_);
  b.l[0] = static_cast<int>(l1);
  long middle = 0;
  for (int i = 0; i < d_; ++i) {
    const long double r = residues[static_cast<std::size_t>(i)];
    if (r == 0) return std::nullopt;
    b.eps[static_cast<std::size_t>(i + 1)] = r > 0 ? 1 : -1;
    const long k = floor_log(*this, std::fabs(r), log_base_);
    if (i < d_ - 1) {
      b.l[static_cast<std::size_t>(i + 1)] = static_cast<int>(-k);
      middle += -k;
    } else {
      b.l[static_cast<std::size_t>(d_)] = static_cast<int>(k + l1 - middle);
    }
  }
  return b;
}

double BucketGeometry::expected(const BucketVec& b) const {
  const long double width = base_ - 1.0L;
  return static_cast<double>(std::pow(width, d_ + 1) * power(b.l[static_cast<std::size_t>(d_)]));
}

bool BucketGeometry::structurally_valid(const BucketVec& b) const {
  if (b.dim() != d_ || b.grid != grid_ || static_cast<int>(b.eps.size()) != d_ + 1) return false;
  for (int e : b.eps)
    if (e != 1 && e != -1) return false;
  const int l1 = b.l[0];
  const int last = b.l[static_cast<std::size_t>(d_)];
  if (last < 0 || last > l1) return false;
  const double n = static_cast<double>(N_);
  if (grid_ == Grid::dyadic) {
    const double lg = std::log2(n);
    if (l1 < 2 * lg - 2 || l1 > 2 * lg + 2 * std::log2(std::log(n))) return false;
    for (int i = 1; i < d_; ++i)
      if (b.l[static_cast<std::size_t>(i)] < 2) return false;
    return true;
  }
  if (l1 < 1 || power(l1) > n * n / 4.0) return false;
  for (int i = 1; i < d_; ++i)
    if (b.l[static_cast<std::size_t>(i)] < 1) return false;
  return true;
}

bool BucketGeometry::residue_box_inside(const BucketVec& b) const {
  long e = b.l[static_cast<std::size_t>(d_)] - b.l[0];
  for (int i = 1; i < d_; ++i) {
    const long li = b.l[static_cast<std::size_t>(i)];
    e += li;
    if (power(-li + 1) > 0.5L) return false;
  }
  return power(e + 1) <= 0.5L;
}

bool BucketGeometry::in_L2(const std::vector<int>& l, int s) const {
  if (static_cast<int>(l.size()) != d_ + 1) return false;
  for (int v : l)
    if (v < 1) return false;
  const long double threshold = log_power(N_, s);
  const long double quarter = static_cast<long double>(N_) * static_cast<long double>(N_) / 4.0L;
  const long double top = power(l[0]);
  const long double last = power(l[static_cast<std::size_t>(d_)]);
  if (!(threshold <= last && last <= top && top <= quarter)) return false;
  for (int i = 1; i < d_; ++i)
    if (power(l[0] - l[static_cast<std::size_t>(i)]) < threshold) return false;
  return true;
}

std::vector<std::vector<int>> all_sign_vectors(int d) {
  std::vector<std::vector<int>> out;
  const int width = d + 1;
  for (int code = 0; code < (1 << width); ++code) {
    std::vector<int> e;
    for (int bit = width - 1; bit >= 0; --bit) e.push_back((code >> bit) & 1 ? -1 : 1);
    out.push_back(e);
  }
  return out;
}

std::vector<BoxCountRecord> box_counts(const AlphaVec& alpha, std::int64_t N, const std::vector<BucketVec>& buckets,
                                       int threads) {
  std::vector<BoxCountRecord> out;
  if (buckets.empty()) return out;
  const int d = alpha.dim();
  const Grid grid = buckets.front().grid;
  const BucketGeometry geom(grid, d, N);
  for (const auto& b : buckets) {
    if (b.grid != grid) throw std::invalid_argument("box_counts: buckets mix grid types");
    if (!geom.structurally_valid(b)) throw std::invalid_argument("box_counts: invalid bucket " + b.label());
  }
  // One scan per distinct (l_1, sign of n_1); each n_1 lands in at most one bucket.
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < buckets.size(); ++k) groups[{buckets[k].l[0], buckets[k].eps[0]}].push_back(k);
  std::vector<std::pair<int, int>> keys;
  for (const auto& [key, idx] : groups) keys.push_back(key);

  std::vector<std::uint64_t> observed(buckets.size(), 0);
  std::vector<std::map<BucketVec, std::uint64_t>> tallies(keys.size());
  parallel_blocks(keys.size(), threads, [&](std::size_t g) {
    const auto [l1, sign] = keys[g];
    std::set<BucketVec> wanted;
    for (std::size_t k : groups.at(keys[g])) wanted.insert(buckets[k]);
    const auto [lo, hi] = geom.n1_range(l1);
    auto& tally = tallies[g];
    std::vector<long double> res(static_cast<std::size_t>(d));
    for (std::int64_t m = lo; m < hi; ++m) {
      const std::int64_t n1 = sign * m;
      for (int i = 0; i < d; ++i) res[static_cast<std::size_t>(i)] = nearest_residue(n1, alpha[i]).value();
      auto b = geom.bucket_of(n1, res);
      if (b && wanted.count(*b)) ++tally[*b];
    }
  });
  for (std::size_t g = 0; g < keys.size(); ++g)
    for (std::size_t k : groups.at(keys[g])) {
      auto it = tallies[g].find(buckets[k]);
      observed[k] = it == tallies[g].end() ? 0 : it->second;
    }
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    BoxCountRecord r;
    r.bucket = buckets[k];
    r.observed = observed[k];
    r.expected = geom.expected(buckets[k]);
    r.relative_error = r.expected > 0 ? (static_cast<double>(r.observed) - r.expected) / r.expected
                                      : std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

// Middle coordinates l_2..l_d in [lo, hi], appended lexicographically.
void middle_vectors(int count, int lo, int hi, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == count) {
    out.push_back(cur);
    return;
  }
  for (int v = lo; v <= hi; ++v) {
    cur.push_back(v);
    middle_vectors(count, lo, hi, cur, out);
    cur.pop_back();
  }
}

std::vector<BucketVec> enumerate_buckets(const BucketGeometry& geom, int l1_lo, int l1_hi, int middle_lo,
                                         double min_expected) {
  const int d = geom.dim();
  std::vector<BucketVec> out;
  const auto signs = all_sign_vectors(d);
  for (int l1 = l1_lo; l1 <= l1_hi; ++l1) {
    // Residue boxes inside [0,1/2] force every middle l_i <= l_1 + 1 on
    // these grids; beyond that the last box cannot fit.
    std::vector<std::vector<int>> middles;
    std::vector<int> cur;
    middle_vectors(d - 1, middle_lo, l1 + 1, cur, middles);
    for (const auto& mid : middles) {
      for (int last = 0; last <= l1; ++last) {
        BucketVec b;
        b.grid = geom.grid();
        b.l.push_back(l1);
        b.l.insert(b.l.end(), mid.begin(), mid.end());
        b.l.push_back(last);
        b.eps = signs.front();
        if (!geom.structurally_valid(b) || !geom.residue_box_inside(b)) continue;
        if (geom.expected(b) < min_expected) continue;
        if (out.size() + signs.size() > kMaxBuckets)
          throw SizeError("bucket list exceeds " + std::to_string(kMaxBuckets) + " entries; raise the expected-count floor");
        for (const auto& e : signs) {
          b.eps = e;
          out.push_back(b);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<BucketVec> geometric_buckets(int d, std::int64_t N, double min_expected) {
  const BucketGeometry geom(Grid::geometric, d, N);
  const long double quarter = static_cast<long double>(N) * static_cast<long double>(N) / 4.0L;
  int top = 0;
  while (geom.power(top + 1) <= quarter) ++top;
  return enumerate_buckets(geom, 1, top, 1, min_expected);
}

std::vector<BucketVec> dyadic_buckets(int d, std::int64_t N, double min_expected) {
  const BucketGeometry geom(Grid::dyadic, d, N);
  const double n = static_cast<double>(N);
  const int lo = static_cast<int>(std::ceil(2 * std::log2(n) - 2));
  const int hi = static_cast<int>(std::floor(2 * std::log2(n) + 2 * std::log2(std::log(n))));
  return enumerate_buckets(geom, lo, hi, 2, min_expected);
}

// ---------------------------------------------------------------------------
// Continued fractions
// ---------------------------------------------------------------------------

ContinuedFraction continued_fraction(UnitFrac a, int depth) {
  if (depth < 1 || depth > 64) throw std::invalid_argument("continued_fraction: depth must be in [1, 64]");
  ContinuedFraction cf;
  // raw/2^128 = 1/(a_1 + 1/(a_2 + ...)); Euclid on (2^128, raw) with the
  // first step done by hand since 2^128 does not fit.
  cf.quotients.push_back(0);
  u128 p_prev = 1, q_prev = 0;  // convergent -1
  u128 p = 0, q = 1;            // convergent 0
  cf.convergents.push_back({p, q});
  if (a.raw == 0) {
    cf.terminated = true;
    return cf;
  }
  const u128 all = ~u128(0);
  u128 quot = all / a.raw;
  u128 rem = all % a.raw + 1;  // 2^128 = quot·raw + rem
  if (rem == a.raw) {
    ++quot;
    rem = 0;
  }
  u128 num = a.raw, den = rem;  // next ratio is num/den
  while (static_cast<int>(cf.quotients.size()) <= depth) {
    u128 pn, qn, t;
    if (__builtin_mul_overflow(quot, p, &t) || __builtin_add_overflow(t, p_prev, &pn) ||
        __builtin_mul_overflow(quot, q, &t) || __builtin_add_overflow(t, q_prev, &qn)) {
      // Only the final convergent of an odd word (q = 2^128) can overflow.
      cf.quotients.push_back(quot);
      cf.terminated = true;
      return cf;
    }
    cf.quotients.push_back(quot);
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    cf.convergents.push_back({p, q});
    if (den == 0) {
      cf.terminated = true;
      return cf;
    }
    quot = num / den;
    const u128 r = num % den;
    num = den;
    den = r;
  }
  return cf;
}

// ---------------------------------------------------------------------------
// Special lines and ε-big vectors
// ---------------------------------------------------------------------------

std::vector<int> neighbor_step(int d, std::int64_t N) {
  const BucketGeometry geom(Grid::geometric, d, N);
  const double ll = std::log(std::log(static_cast<double>(N)));
  const int step = static_cast<int>(std::lround(9.0 * ll / static_cast<double>(std::log(geom.base()))));
  std::vector<int> out(static_cast<std::size_t>(d + 1), -step);
  out.front() = step;
  out.back() = (d + 1) * step;
  return out;
}

LineCensus line_census(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                       const LinearFormMask& mask, int threads) {
  const int d = alpha.dim();
  if (d > 2 || N > 1024) throw SizeError("line_census is limited to d <= 2 and N <= 2^10");
  if (N < 2) throw std::invalid_argument("line_census needs N >= 2");
  if (static_cast<int>(mask.s.size()) != d + 1) throw std::invalid_argument("mask length must be d+1");
  params.validate(d);
  const BucketGeometry geom(Grid::geometric, d, N);
  const int s = params.s_exponent;
  const long double threshold = log_power(N, s);
  const std::int64_t quarter = N * N / 4;  // N²/4 rounded down; |n_1| < N²/4

  struct Cell {
    std::uint64_t count = 0;
    ComplexSum sum;
  };
  using Cells = std::map<BucketVec, Cell>;
  const std::int64_t top = (N * N) % 4 == 0 ? quarter - 1 : quarter;
  const std::int64_t span = std::max<std::int64_t>(0, top - 1);
  const auto blocks = static_cast<std::size_t>((span + kScanBlock - 1) / kScanBlock);
  std::vector<Cells> partial(blocks);
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::int64_t first = 2 + static_cast<std::int64_t>(b) * kScanBlock;
    const std::int64_t last = std::min(top, first + kScanBlock - 1);
    for (std::int64_t m = first; m <= last; ++m) {
      for (std::int64_t n1 : {m, -m}) {
        const std::vector<long double> res = nearest_residues(n1, alpha);
        long double product = static_cast<long double>(m);
        for (long double r : res) product *= std::fabs(r);
        if (!(product > threshold)) continue;
        auto bucket = geom.bucket_of(n1, res);
        if (!bucket || !geom.in_L2(bucket->l, s)) continue;
        const UnitFrac ph = lambda_phase(mask, FourierIndex::nearest(n1, alpha), x, N, alpha);
        const long double angle = 2.0L * std::numbers::pi_v<long double> * std::ldexp(static_cast<long double>(ph.raw), -128);
        Cell& c = partial[b][*bucket];
        ++c.count;
        c.sum.add({static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))});
      }
    }
  });
  Cells cells;
  for (auto& part : partial)
    for (auto& [key, cell] : part) {
      Cell& c = cells[key];
      c.count += cell.count;
      c.sum.merge(cell.sum);
    }

  LineCensus census;
  census.step = neighbor_step(d, N);
  // ε pairs differ in the n_1 sign only; ε+ gives a positive divisor sign.
  for (const auto& e : all_sign_vectors(d)) {
    if (e[0] != 1) continue;
    int prod = 1;
    for (int v : e) prod *= v;
    std::vector<int> plus = e;
    if (prod < 0) plus[0] = -1;
    census.pair_signs.push_back(plus);
  }
  const double logN = std::log(static_cast<double>(N));
  auto lookup = [&](const std::vector<int>& l, const std::vector<int>& eps) -> const Cell* {
    BucketVec key{l, eps, Grid::geometric};
    auto it = cells.find(key);
    return it == cells.end() ? nullptr : &it->second;
  };
  // Returns (occupied, big) for one pair at l.
  auto evaluate = [&](const std::vector<int>& l, const std::vector<int>& plus) {
    std::vector<int> minus = plus;
    minus[0] = -minus[0];
    const Cell* cp = lookup(l, plus);
    const Cell* cm = lookup(l, minus);
    const std::uint64_t total = (cp ? cp->count : 0) + (cm ? cm->count : 0);
    if (total == 0) return std::pair<bool, bool>{false, false};
    const std::complex<double> diff = (cp ? cp->sum.value() : 0.0) - (cm ? cm->sum.value() : 0.0);
    return std::pair<bool, bool>{true, static_cast<double>(total) / logN <= std::abs(diff)};
  };

  auto shifted = [&](const std::vector<int>& l, int dir) {
    std::vector<int> h = l;
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += dir * census.step[i];
    return h;
  };
  std::set<std::vector<int>> starts;
  for (const auto& [key, cell] : cells) {
    std::vector<int> l = key.l;
    for (;;) {
      std::vector<int> prev = shifted(l, -1);
      if (!geom.in_L2(prev, s)) break;
      l = std::move(prev);
    }
    starts.insert(l);
  }
  for (const auto& start : starts) {
    LineEntry line;
    line.start = start;
    line.big.resize(census.pair_signs.size());
    bool multiple = false;
    for (std::vector<int> l = start; geom.in_L2(l, s); l = shifted(l, 1)) {
      bool occupied = false;
      for (std::size_t k = 0; k < census.pair_signs.size(); ++k) {
        auto [occ, big] = evaluate(l, census.pair_signs[k]);
        occupied = occupied || occ;
        if (big) {
          line.big[k].push_back(line.length);
          ++line.big_total;
        }
      }
      line.occupied += occupied ? 1 : 0;
      ++line.length;
    }
    for (const auto& b : line.big) multiple = multiple || b.size() >= 2;
    census.total_big += line.big_total;
    census.lines_with_multiple += multiple ? 1 : 0;
    census.lines.push_back(std::move(line));
  }
  return census;
}

}  // namespace equidist
