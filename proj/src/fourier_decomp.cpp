#include "equidist/fourier_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "equidist/parallel.hpp"
#include "equidist/summation.hpp"

namespace equidist {

// term_prefactor_note: integrating the box indicator against e^{-2πi ν·y}
// gives factors (e^{2πi n_1 x} - 1)/(2πi n_1) and (1 - e^{-2πi N r})/(2πi r).
// Collecting the 1/i factors yields (-i)^{d+1}·(-1) = (-1)^d i^{d+1} in front
// of (1 - e^{2πi n_1 x})/(2π n_1)·∏(1 - e^{-2πi N r_i})/(2π r_i). For odd d
// this is the negative of i^{d+1}; the direct roof-average integration
// confirms the sign.

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr std::int64_t kBlock = 4096;

// Σ_{j≥1} 2/(4π³ (j - 1/2)³) = 7ζ(3)/(2π³): bound on the non-nearest part of
// one axis sum.
constexpr double kAxisOffNearest = 7.0 * 1.2020569031595942 / (2.0 * 31.006276680299820);

long double signed_value(UnitFrac y) {
  if (y.raw <= UnitFrac::kHalf) return std::ldexp(static_cast<long double>(y.raw), -128);
  return -std::ldexp(static_cast<long double>(u128(0) - y.raw), -128);
}

struct AxisData {
  SignedResidue res;
  long double r0 = 0;      // n_1 α_i - nearest
  long double t = 0;       // N·r0 mod 1, signed representative
  long double s2 = 0;      // sin(2π r0)
};

AxisData make_axis(std::int64_t n1, UnitFrac a, std::int64_t N) {
  AxisData ax;
  ax.res = nearest_residue(n1, a);
  ax.r0 = ax.res.value();
  ax.t = signed_value(frac_mul_int(ax.res.as_frac(), N));
  ax.s2 = std::sin(2 * kPi * ax.r0);
  return ax;
}

// (1 - e^{-2πi N r})/(2π r)·[sin(2π r)/(2π r)]² at r = r0 - j.
std::complex<double> axis_factor(const AxisData& ax, std::int64_t j, std::int64_t N) {
  if (ax.res.raw == 0) return j == 0 ? std::complex<double>(0.0, static_cast<double>(N)) : 0.0;
  const long double r = ax.r0 - static_cast<long double>(j);
  const long double st = std::sin(kPi * ax.t);
  const long double ct = std::cos(kPi * ax.t);
  const long double den = 2 * kPi * r;
  const long double mag = 2 * st * ax.s2 * ax.s2 / (den * den * den);
  return {static_cast<double>(mag * st), static_cast<double>(mag * ct)};
}

long double sinc_sq(long double r) {
  if (r == 0) return 1;
  const long double v = std::sin(2 * kPi * r) / (2 * kPi * r);
  return v * v;
}

// [sin(2π n_1/N²)/(2π n_1/N²)]² with the sine argument reduced exactly.
long double n1_sinc_sq(std::int64_t n1, std::int64_t N) {
  const std::int64_t N2 = N * N;
  const long double arg = 2 * kPi * static_cast<long double>(n1) / static_cast<long double>(N2);
  const long double red = 2 * kPi * static_cast<long double>(n1 % N2) / static_cast<long double>(N2);
  const long double v = std::sin(red) / arg;
  return v * v;
}

// (1 - e^{2πi n_1 x})/(2π n_1)·[sinc(n_1/N²)]².
std::complex<double> first_factor(std::int64_t n1, UnitFrac xw, std::int64_t N) {
  const long double q = signed_value(frac_mul_int(xw, n1));
  const long double sq = std::sin(kPi * q);
  const long double cq = std::cos(kPi * q);
  const long double scale = 2 * sq / (2 * kPi * static_cast<long double>(n1)) * n1_sinc_sq(n1, N);
  return {static_cast<double>(scale * sq), static_cast<double>(-scale * cq)};
}

std::int64_t largest_below(double bound) {
  const double c = std::ceil(bound);
  return static_cast<std::int64_t>(c) - 1;
}

long double log_power(std::int64_t N, int s) { return std::pow(std::log(static_cast<long double>(N)), s); }

struct N1Range {
  std::int64_t lo = 1;  // magnitudes lo..hi inclusive
  std::int64_t hi = 0;
};

// Visits n_1 = +m, -m for m in [lo, hi], grouped into fixed-size blocks
// reduced in block order.
template <class Acc, class Fn>
std::vector<Acc> run_blocks(N1Range range, int threads, Fn&& fn) {
  if (range.hi < range.lo) return {};
  const std::int64_t count = range.hi - range.lo + 1;
  const auto blocks = static_cast<std::size_t>((count + kBlock - 1) / kBlock);
  std::vector<Acc> acc(blocks);
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::int64_t first = range.lo + static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t last = std::min(range.hi, first + kBlock - 1);
    for (std::int64_t m = first; m <= last; ++m) {
      fn(acc[b], m);
      fn(acc[b], -m);
    }
  });
  return acc;
}

struct TermAcc {
  ComplexSum sum;
  CompensatedSum magnitude;
  CompensatedSum window_tail;
  std::uint64_t terms = 0;
};

}  // namespace

FourierParams FourierParams::defaults(int d, std::int64_t N) {
  FourierParams p;
  p.s_exponent = min_s(d);
  p.cutoff_n1 = static_cast<std::int64_t>(std::floor(u1_bound(N)));
  p.tail_window = 32;
  return p;
}

void FourierParams::validate(int d) const {
  if (tail_window < 1) throw std::invalid_argument("tail window K must be >= 1");
  if (cutoff_n1 < 1) throw std::invalid_argument("cutoff_n1 must be >= 1");
  if (s_exponent < 0) throw std::invalid_argument("s exponent must be >= 0");
  if (!relaxed && s_exponent < min_s(d))
    throw std::invalid_argument("s exponent must be >= (d+2)d+4 = " + std::to_string(min_s(d)) +
                                " unless relaxed mode is requested");
}

double u1_bound(std::int64_t N) {
  const double l = std::log(static_cast<double>(N));
  return static_cast<double>(N) * static_cast<double>(N) * l * l;
}

FourierIndex FourierIndex::nearest(std::int64_t n1, const AlphaVec& alpha) {
  FourierIndex idx;
  idx.n.push_back(n1);
  for (int i = 0; i < alpha.dim(); ++i) idx.n.push_back(nearest_residue(n1, alpha[i]).nearest);
  return idx;
}

int LinearFormMask::sign() const {
  int total = 0;
  for (int v : s) total += v;
  return total % 2 == 0 ? 1 : -1;
}

std::string LinearFormMask::label() const {
  std::string out;
  for (int v : s) out.push_back(v ? '1' : '0');
  return out;
}

LinearFormMask LinearFormMask::parse(std::string_view bits) {
  LinearFormMask m;
  bool any = false;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("mask must be a string of 0/1 digits");
    m.s.push_back(c == '1');
    any = any || c == '1';
  }
  if (!any) throw std::invalid_argument("mask must not be all zeros");
  return m;
}

std::vector<LinearFormMask> all_masks(int d) {
  std::vector<LinearFormMask> out;
  const int width = d + 1;
  for (int code = 1; code < (1 << width); ++code) {
    LinearFormMask m;
    for (int bit = width - 1; bit >= 0; --bit) m.s.push_back((code >> bit) & 1);
    out.push_back(m);
  }
  return out;
}

std::complex<double> term_prefactor(int d) {
  // i^{d+1}
  static constexpr std::complex<double> kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::complex<double> p = kPowers[(d + 1) % 4];
  return d % 2 == 0 ? p : -p;
}

double g_factor(const FourierIndex& n, const AlphaVec& alpha, std::int64_t N) {
  if (n.n1() == 0) throw std::invalid_argument("g_factor: n_1 must be nonzero");
  long double g = n1_sinc_sq(n.n1(), N);
  for (int i = 0; i < alpha.dim(); ++i) {
    const SignedResidue r = nearest_residue(n.n1(), alpha[i]);
    const std::int64_t j = n.n[static_cast<std::size_t>(i + 1)] - r.nearest;
    if (r.raw == 0) {
      if (j != 0) return 0.0;
      continue;
    }
    g *= sinc_sq(r.value() - static_cast<long double>(j));
  }
  return static_cast<double>(g);
}

std::complex<double> f_term(const FourierIndex& n, double x, const AlphaVec& alpha, std::int64_t N) {
  if (n.n1() == 0) throw std::invalid_argument("f_term: n_1 must be nonzero");
  if (n.dim() != alpha.dim()) throw std::invalid_argument("f_term: index dimension mismatch");
  std::complex<double> v = term_prefactor(alpha.dim()) * first_factor(n.n1(), frac_from_real_mod1(x), N);
  for (int i = 0; i < alpha.dim(); ++i) {
    const AxisData ax = make_axis(n.n1(), alpha[i], N);
    v *= axis_factor(ax, n.n[static_cast<std::size_t>(i + 1)] - ax.res.nearest, N);
  }
  return v;
}

long double lambda_form(const LinearFormMask& mask, const FourierIndex& n, double x, std::int64_t N,
                        const AlphaVec& alpha) {
  long double v = mask.s[0] ? static_cast<long double>(n.n1()) * x : 0;
  for (int i = 0; i < alpha.dim(); ++i) {
    if (!mask.s[static_cast<std::size_t>(i + 1)]) continue;
    const SignedResidue r = nearest_residue(n.n1(), alpha[i]);
    const long double ri = r.value() + static_cast<long double>(r.nearest - n.n[static_cast<std::size_t>(i + 1)]);
    v -= static_cast<long double>(N) * ri;
  }
  return v;
}

UnitFrac lambda_phase(const LinearFormMask& mask, const FourierIndex& n, double x, std::int64_t N,
                      const AlphaVec& alpha) {
  UnitFrac v;
  if (mask.s[0]) v += frac_mul_int(frac_from_real_mod1(x), n.n1());
  for (int i = 0; i < alpha.dim(); ++i) {
    if (!mask.s[static_cast<std::size_t>(i + 1)]) continue;
    // n_1 α_i - n_{i+1} ≡ n_1 α_i mod 1, so N r_i ≡ N·n_1·α_i.
    v -= frac_mul_int(frac_mul_int(alpha[i], n.n1()), N);
  }
  return v;
}

bool index_set_membership(const FourierIndex& n, IndexSet which, const AlphaVec& alpha, std::int64_t N,
                          const FourierParams& params) {
  const bool nonzero = std::any_of(n.n.begin(), n.n.end(), [](std::int64_t v) { return v != 0; });
  if (!nonzero) return false;
  const auto mag = static_cast<double>(n.n1() < 0 ? -n.n1() : n.n1());
  const double bound = u1_bound(N);
  if (which == IndexSet::U1) return mag < bound;
  long double product = mag;
  for (int i = 0; i < alpha.dim(); ++i) {
    const SignedResidue r = nearest_residue(n.n1(), alpha[i]);
    if (n.n[static_cast<std::size_t>(i + 1)] != r.nearest) return false;
    product *= std::fabs(r.value());
  }
  if (which == IndexSet::U2) return mag < bound;
  const bool small_divisor_ok = product > log_power(N, params.s_exponent);
  if (which == IndexSet::U3) return mag >= 1 && mag <= bound && small_divisor_ok;
  const double quarter = static_cast<double>(N) * static_cast<double>(N) / 4.0;
  return mag > 1 && mag < quarter && small_divisor_ok;
}

const char* to_string(Component c) {
  switch (c) {
    case Component::full: return "D";
    case Component::D1: return "D1";
    case Component::D2: return "D2";
    case Component::D3: return "D3";
    case Component::D4: return "D4";
    case Component::D5: return "D5";
    case Component::D6: return "D6";
  }
  return "?";
}

Component parse_component(std::string_view text) {
  if (text == "D" || text == "full") return Component::full;
  if (text == "D1") return Component::D1;
  if (text == "D2") return Component::D2;
  if (text == "D3") return Component::D3;
  if (text == "D4") return Component::D4;
  if (text == "D5") return Component::D5;
  if (text == "D6") return Component::D6;
  throw std::invalid_argument("unknown component: " + std::string(text));
}

std::vector<long double> nearest_residues(std::int64_t n1, const AlphaVec& alpha) {
  std::vector<long double> r;
  r.reserve(static_cast<std::size_t>(alpha.dim()));
  for (int i = 0; i < alpha.dim(); ++i) r.push_back(nearest_residue(n1, alpha[i]).value());
  return r;
}

std::complex<double> exponential_sum(const std::vector<std::int64_t>& n1s, const LinearFormMask& mask, double x,
                                     std::int64_t N, const AlphaVec& alpha) {
  ComplexSum sum;
  for (std::int64_t n1 : n1s) {
    const long double ph = 2 * kPi * signed_value(lambda_phase(mask, FourierIndex::nearest(n1, alpha), x, N, alpha));
    sum.add({static_cast<double>(std::cos(ph)), static_cast<double>(std::sin(ph))});
  }
  return sum.value();
}

ComponentReport component_sum(Component which, const AlphaVec& alpha, double x, std::int64_t N,
                              const FourierParams& params, const std::optional<LinearFormMask>& mask, int threads) {
  const int d = alpha.dim();
  params.validate(d);
  if (N < 2) throw std::invalid_argument("component sums need N >= 2");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0,1]");
  if (which == Component::D6) {
    if (!mask) throw std::invalid_argument("D6 needs a linear-form mask");
    if (static_cast<int>(mask->s.size()) != d + 1) throw std::invalid_argument("mask length must be d+1");
  }

  const double bound = u1_bound(N);
  const double quarter = static_cast<double>(N) * static_cast<double>(N) / 4.0;
  const long double threshold = log_power(N, params.s_exponent);
  const UnitFrac xw = frac_from_real_mod1(x);
  const std::complex<double> pref = term_prefactor(d);
  const int K = params.tail_window;
  const double tau = 1.0 / (4.0 * std::pow(std::numbers::pi, 3) * static_cast<double>(K) * static_cast<double>(K));

  N1Range range;
  bool windowed = false;
  switch (which) {
    case Component::full:
      range = {1, params.cutoff_n1};
      windowed = true;
      break;
    case Component::D1:
      range = {1, largest_below(bound)};
      windowed = true;
      break;
    case Component::D2:
      range = {1, largest_below(bound)};
      break;
    case Component::D3:
      range = {1, static_cast<std::int64_t>(std::floor(bound))};
      break;
    default:
      range = {2, largest_below(quarter)};
      break;
  }
  if (which != Component::full && params.cutoff_n1 < range.hi)
    throw std::invalid_argument("cutoff_n1 = " + std::to_string(params.cutoff_n1) + " is too small for " +
                                to_string(which) + " (needs " + std::to_string(range.hi) + ")");

  auto visit = [&](TermAcc& acc, std::int64_t n1) {
    std::vector<AxisData> axes;
    axes.reserve(static_cast<std::size_t>(d));
    long double product = std::fabs(static_cast<long double>(n1));
    for (int i = 0; i < d; ++i) {
      axes.push_back(make_axis(n1, alpha[i], N));
      product *= std::fabs(axes.back().r0);
    }
    const bool needs_threshold = which == Component::D3 || which == Component::D4 || which == Component::D5 ||
                                 which == Component::D6;
    if (needs_threshold && !(product > threshold)) return;

    if (which == Component::D5 || which == Component::D6) {
      long double g = n1_sinc_sq(n1, N);
      long double divisor = static_cast<long double>(n1);
      for (const auto& ax : axes) {
        g *= sinc_sq(ax.r0);
        divisor *= ax.r0;
      }
      const long double main = g / divisor;
      if (which == Component::D5) {
        acc.sum.add({static_cast<double>(main), 0.0});
      } else {
        long double ph = 0;
        UnitFrac phase;
        if (mask->s[0]) phase += frac_mul_int(xw, n1);
        for (int i = 0; i < d; ++i)
          if (mask->s[static_cast<std::size_t>(i + 1)]) phase -= frac_mul_int(axes[static_cast<std::size_t>(i)].res.as_frac(), N);
        ph = 2 * kPi * signed_value(phase);
        acc.sum.add({static_cast<double>(main * std::cos(ph)), static_cast<double>(main * std::sin(ph))});
      }
      acc.magnitude.add(static_cast<double>(std::fabs(main)));
      ++acc.terms;
      return;
    }

    const std::complex<double> a = pref * first_factor(n1, xw, N);
    if (!windowed) {
      std::complex<double> v = a;
      for (const auto& ax : axes) v *= axis_factor(ax, 0, N);
      acc.sum.add(v);
      acc.magnitude.add(std::abs(v));
      ++acc.terms;
      return;
    }
    // The summand factorizes over axes, so the windowed sum over
    // (n_2..n_{d+1}) is the product of per-axis window sums.
    std::complex<double> prod = a;
    double with_tail = 1.0;
    double without_tail = 1.0;
    for (const auto& ax : axes) {
      ComplexSum axis;
      for (std::int64_t j = -K; j <= K; ++j) axis.add(axis_factor(ax, j, N));
      const std::complex<double> h = axis.value();
      prod *= h;
      with_tail *= std::abs(h) + tau;
      without_tail *= std::abs(h);
    }
    acc.sum.add(prod);
    acc.magnitude.add(std::abs(prod));
    acc.window_tail.add(std::abs(a) * (with_tail - without_tail));
    std::uint64_t per = 1;
    for (int i = 0; i < d; ++i) per *= static_cast<std::uint64_t>(2 * K + 1);
    acc.terms += per;
  };

  auto blocks = run_blocks<TermAcc>(range, threads, visit);
  TermAcc total;
  for (const auto& b : blocks) {
    total.sum.merge(b.sum);
    total.magnitude.merge(b.magnitude);
    total.window_tail.merge(b.window_tail);
    total.terms += b.terms;
  }

  ComponentReport rep;
  rep.id = to_string(which);
  rep.mask = which == Component::D6 ? mask : std::nullopt;
  rep.value = total.sum.value();
  rep.term_count = total.terms;
  if (windowed) {
    double tail = total.window_tail.value();
    if (which == Component::full) {
      const double c = static_cast<double>(params.cutoff_n1);
      const double n4 = std::pow(static_cast<double>(N), 4);
      tail += n4 * std::pow(static_cast<double>(N) + kAxisOffNearest, d) /
              (4.0 * std::pow(std::numbers::pi, 3) * c * c);
    }
    tail += 16.0 * std::numeric_limits<double>::epsilon() * total.magnitude.value();
    rep.tail_bound = tail;
  }
  return rep;
}

std::vector<ComponentReport> decomposition(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                                           int threads) {
  std::vector<ComponentReport> out;
  for (Component c : {Component::full, Component::D1, Component::D2, Component::D3, Component::D4, Component::D5})
    out.push_back(component_sum(c, alpha, x, N, params, std::nullopt, threads));
  for (std::size_t k = 1; k <= 4; ++k) out[k].step_difference = std::abs(out[k].value - out[k - 1].value);
  for (const auto& m : all_masks(alpha.dim()))
    out.push_back(component_sum(Component::D6, alpha, x, N, params, m, threads));
  return out;
}

std::complex<double> recombine_d4(int d, std::complex<double> d5, const std::vector<ComponentReport>& d6_by_mask) {
  ComplexSum inner;
  inner.add(d5);
  for (const auto& r : d6_by_mask) {
    if (!r.mask) throw std::invalid_argument("recombine_d4: D6 report without mask");
    inner.add(static_cast<double>(r.mask->sign()) * r.value);
  }
  const double scale = std::pow(2.0 * std::numbers::pi, d + 1);
  return term_prefactor(d) * inner.value() / scale;
}

PairReport pair_cancellation_report(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                                    double template_constant, int threads) {
  (void)x;  // the main terms carry no x dependence
  const int d = alpha.dim();
  params.validate(d);
  if (N < 2) throw std::invalid_argument("pair report needs N >= 2");
  const BucketGeometry geom(Grid::geometric, d, N);
  const long double threshold = log_power(N, params.s_exponent);
  const double quarter = static_cast<double>(N) * static_cast<double>(N) / 4.0;

  struct Cell {
    CompensatedSum sum;
    std::uint64_t count = 0;
  };
  struct Acc {
    std::map<BucketVec, Cell> cells;
    CompensatedSum residual;
    std::uint64_t residual_terms = 0;
    CompensatedSum d5;
  };
  auto blocks = run_blocks<Acc>({2, largest_below(quarter)}, threads, [&](Acc& acc, std::int64_t n1) {
    std::vector<long double> res = nearest_residues(n1, alpha);
    long double product = std::fabs(static_cast<long double>(n1));
    long double g = n1_sinc_sq(n1, N);
    long double divisor = static_cast<long double>(n1);
    for (long double r : res) {
      product *= std::fabs(r);
      g *= sinc_sq(r);
      divisor *= r;
    }
    if (!(product > threshold)) return;
    const double main = static_cast<double>(g / divisor);
    acc.d5.add(main);
    auto b = geom.bucket_of(n1, res);
    if (b && geom.in_L2(b->l, params.s_exponent)) {
      Cell& c = acc.cells[*b];
      c.sum.add(main);
      ++c.count;
    } else {
      acc.residual.add(main);
      ++acc.residual_terms;
    }
  });

  std::map<BucketVec, Cell> cells;
  PairReport rep;
  CompensatedSum residual, d5;
  for (auto& b : blocks) {
    for (auto& [key, cell] : b.cells) {
      Cell& c = cells[key];
      c.sum.merge(cell.sum);
      c.count += cell.count;
    }
    residual.merge(b.residual);
    rep.residual_terms += b.residual_terms;
    d5.merge(b.d5);
  }
  rep.delta_N = geom.delta();
  rep.template_constant = template_constant;
  rep.residual = residual.value();
  rep.d5 = d5.value();
  const double bound = template_constant * std::pow(geom.delta(), d + 2);

  // Pair partner: flip the sign of n_1, which flips the divisor sign.
  std::map<std::pair<std::vector<int>, std::vector<int>>, PairRecord> pairs;
  for (const auto& [key, cell] : cells) {
    std::vector<int> base = key.eps;
    base[0] = 1;
    auto& rec = pairs[{key.l, base}];
    if (rec.l.empty()) {
      rec.l = key.l;
      std::vector<int> other = base;
      other[0] = -1;
      int prod = 1;
      for (int e : base) prod *= e;
      rec.eps_plus = prod > 0 ? base : other;
      rec.eps_minus = prod > 0 ? other : base;
      rec.bound = bound;
    }
    if (key.eps == rec.eps_plus) {
      rec.sum_plus = cell.sum.value();
      rec.count_plus = cell.count;
    } else {
      rec.sum_minus = cell.sum.value();
      rec.count_minus = cell.count;
    }
  }
  for (auto& [key, rec] : pairs) {
    CompensatedSum s;
    s.add(rec.sum_plus);
    s.add(rec.sum_minus);
    rec.paired_sum = s.value();
    rec.flagged = std::fabs(rec.paired_sum) > rec.bound;
    rep.flagged += rec.flagged ? 1 : 0;
    rep.pairs.push_back(rec);
  }
  return rep;
}

}  // namespace equidist
