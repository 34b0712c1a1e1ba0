#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "equidist/discrepancy.hpp"
#include "equidist/fourier_decomp.hpp"

using namespace equidist;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

AlphaVec golden1() { return AlphaVec({golden_frac()}); }

FourierParams relaxed(int d, std::int64_t N, int s) {
  FourierParams p = FourierParams::defaults(d, N);
  p.s_exponent = s;
  p.relaxed = true;
  return p;
}

double sinc2(double t) {
  if (t == 0) return 1.0;
  const double v = std::sin(2 * kPi * t) / (2 * kPi * t);
  return v * v;
}

}  // namespace

TEST_CASE("parameters") {
  CHECK(FourierParams::min_s(1) == 7);
  CHECK(FourierParams::min_s(2) == 12);
  const FourierParams p = FourierParams::defaults(1, 16);
  CHECK(p.s_exponent == 7);
  CHECK(p.cutoff_n1 == static_cast<std::int64_t>(std::floor(256 * std::pow(std::log(16.0), 2))));
  CHECK(p.tail_window == 32);
  FourierParams bad = p;
  bad.s_exponent = 3;
  CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
  bad.relaxed = true;
  CHECK_NOTHROW(bad.validate(1));
  bad.tail_window = 0;
  CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
}

TEST_CASE("prefactor") {
  CHECK(term_prefactor(1) == cplx(1, 0));
  CHECK(term_prefactor(2) == cplx(0, -1));
  CHECK(term_prefactor(3) == cplx(-1, 0));
  CHECK(term_prefactor(4) == cplx(0, 1));
}

TEST_CASE("masks") {
  CHECK(all_masks(1).size() == 3);
  CHECK(all_masks(2).size() == 7);
  CHECK(all_masks(3).size() == 15);
  CHECK(all_masks(2).front().label() == "001");
  CHECK(all_masks(2).back().label() == "111");
  CHECK(LinearFormMask::parse("101").sign() == 1);
  CHECK(LinearFormMask::parse("100").sign() == -1);
  CHECK_THROWS_AS(LinearFormMask::parse("000"), std::invalid_argument);
  CHECK_THROWS_AS(LinearFormMask::parse("1a"), std::invalid_argument);
}

TEST_CASE("g factor") {
  const AlphaVec zero({UnitFrac()});
  // n_1 = N²/4 with zero residue: (sin(π/2)/(π/2))²
  CHECK(g_factor(FourierIndex{{64, 0}}, zero, 16) == doctest::Approx(4 / (kPi * kPi)).epsilon(1e-14));
  // both arguments near 0
  CHECK(g_factor(FourierIndex{{1, 0}}, zero, 1 << 20) == doctest::Approx(1.0).epsilon(1e-12));
  // a residue that is a nonzero integer
  CHECK(g_factor(FourierIndex{{5, 3}}, zero, 16) == 0.0);
  CHECK(g_factor(FourierIndex{{5, 0, 2}}, AlphaVec({UnitFrac(), UnitFrac()}), 16) == 0.0);

  const AlphaVec a = AlphaVec::random(1, 2);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 500; ++k) {
    const auto n1 = static_cast<std::int64_t>(rng() % 100000) + 1;
    FourierIndex n = FourierIndex::nearest(n1, a);
    n.n[1] += static_cast<std::int64_t>(rng() % 5) - 2;
    const double g = g_factor(n, a, 64);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    const double r1 = static_cast<double>(nearest_residue(n1, a[0]).value()) + (FourierIndex::nearest(n1, a).n[1] - n.n[1]);
    const double r2 = static_cast<double>(nearest_residue(n1, a[1]).value());
    CHECK(g == doctest::Approx(sinc2(n1 / 4096.0) * sinc2(r1) * sinc2(r2)).epsilon(1e-9));
  }
}

TEST_CASE("single term against a 50-digit evaluation") {
  // d=1, n=(1,1), α=(√5-1)/2, N=8, x=1/2, computed with mpmath at 50 digits
  const cplx v = f_term(FourierIndex{{1, 1}}, 0.5, golden1(), 8);
  CHECK(v.real() == doctest::Approx(-0.00063549940905349172).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(0.0035927077211054271).epsilon(1e-12));
}

TEST_CASE("vanishing terms") {
  const AlphaVec a = AlphaVec::random(3, 2);
  CHECK(f_term(FourierIndex::nearest(17, a), 0.0, a, 16) == cplx(0, 0));
  CHECK(f_term(FourierIndex::nearest(17, a), 1.0, a, 16) == cplx(0, 0));
  // integer residues: α = 0 and n_2 != 0
  const AlphaVec zero({UnitFrac()});
  CHECK(f_term(FourierIndex{{3, 2}}, 0.4, zero, 8) == cplx(0, 0));
  CHECK(f_term(FourierIndex{{3, -1}}, 0.4, zero, 8) == cplx(0, 0));
  CHECK_THROWS(f_term(FourierIndex{{0, 0}}, 0.4, zero, 8));
  // a zero residue takes the limit i·N
  const cplx t = f_term(FourierIndex{{3, 0}}, 0.4, zero, 8);
  const double q = 3 * 0.4;
  const cplx first = (1.0 - std::exp(cplx(0, 2 * kPi * q))) / (2 * kPi * 3) * sinc2(3.0 / 64);
  CHECK(std::abs(t - first * cplx(0, 8)) < 1e-14);
}

TEST_CASE("axis sum over all n_2 matches the closed form") {
  // Σ_j (1 - e^{-2πiN(r-j)})/(2π(r-j))·sinc²(r-j) = (1 - e^{-2πiNr})·cos³(πr)/(2 sin(πr))
  const AlphaVec a = golden1();
  const std::int64_t N = 8;
  const double x = 0.3;
  for (std::int64_t n1 : {1, 2, 5, 13, 40}) {
    const FourierIndex base = FourierIndex::nearest(n1, a);
    const double r = static_cast<double>(nearest_residue(n1, a[0]).value());
    const int K = 3000;
    cplx sum = 0;
    for (int j = K; j >= -K; --j) sum += f_term(FourierIndex{{n1, base.n[1] + j}}, x, a, N);
    const cplx first = (1.0 - std::exp(cplx(0, 2 * kPi * n1 * x))) / (2 * kPi * static_cast<double>(n1)) *
                       sinc2(static_cast<double>(n1) / (N * N));
    const double c = std::cos(kPi * r);
    const cplx axis = (1.0 - std::exp(cplx(0, -2 * kPi * N * r))) * (c * c * c) / (2 * std::sin(kPi * r));
    CHECK(std::abs(sum - term_prefactor(1) * first * axis) < std::abs(first) * 1e-7 + 1e-15);
  }
}

TEST_CASE("linear forms") {
  const AlphaVec a = AlphaVec::random(5, 2);
  const FourierIndex n{{7, 4, -2}};
  const double r1 = 7 * a[0].to_double() - 4;
  const double r2 = 7 * a[1].to_double() + 2;
  CHECK(lambda_form(LinearFormMask::parse("100"), n, 0.3, 16, a) == doctest::Approx(2.1));
  CHECK(lambda_form(LinearFormMask::parse("010"), n, 0.3, 16, a) == doctest::Approx(-16 * r1));
  CHECK(lambda_form(LinearFormMask::parse("111"), n, 0.3, 16, a) == doctest::Approx(2.1 - 16 * r1 - 16 * r2));

  std::mt19937_64 rng(4);
  auto draw = [&] {
    FourierIndex m{{static_cast<std::int64_t>(rng() % 2000) - 1000, static_cast<std::int64_t>(rng() % 2000) - 1000,
                    static_cast<std::int64_t>(rng() % 2000) - 1000}};
    return m;
  };
  for (int k = 0; k < 300; ++k) {
    const FourierIndex p = draw(), q = draw();
    FourierIndex s{{p.n[0] + q.n[0], p.n[1] + q.n[1], p.n[2] + q.n[2]}};
    for (const auto& m : all_masks(2)) {
      const long double lhs = lambda_form(m, s, 0.37, 32, a);
      const long double rhs = lambda_form(m, p, 0.37, 32, a) + lambda_form(m, q, 0.37, 32, a);
      CHECK(static_cast<double>(std::fabs(lhs - rhs)) < 1e-9);
      // the exact phase is the same value mod 1
      const long double frac = lhs - std::floor(lhs);
      const double ph = lambda_phase(m, s, 0.37, 32, a).to_double();
      CHECK(std::fabs(std::remainder(static_cast<double>(frac) - ph, 1.0)) < 1e-9);
    }
  }
}

TEST_CASE("index sets") {
  const AlphaVec a = golden1();
  const FourierParams p = FourierParams::defaults(1, 1024);
  CHECK_FALSE(index_set_membership(FourierIndex::nearest(1, a), IndexSet::U4, a, 1024, relaxed(1, 1024, 0)));
  // 2‖2α‖ < 1, 4‖4α‖ ≈ 1.89
  CHECK_FALSE(index_set_membership(FourierIndex::nearest(2, a), IndexSet::U4, a, 1024, relaxed(1, 1024, 0)));
  CHECK(index_set_membership(FourierIndex::nearest(4, a), IndexSet::U4, a, 1024, relaxed(1, 1024, 0)));
  CHECK_FALSE(index_set_membership(FourierIndex{{0, 0}}, IndexSet::U1, a, 1024, p));
  CHECK(index_set_membership(FourierIndex{{0, 3}}, IndexSet::U1, a, 1024, p));
  FourierIndex off = FourierIndex::nearest(5, a);
  off.n[1] += 1;
  CHECK(index_set_membership(off, IndexSet::U1, a, 1024, p));
  CHECK_FALSE(index_set_membership(off, IndexSet::U2, a, 1024, p));

  // admissible s: (log 1024)^7 > 1024²/4, so U_4 is empty
  CHECK(std::pow(std::log(1024.0), 7) > 1024.0 * 1024 / 4);
  for (std::int64_t n1 = 2; n1 < 1024 * 256; n1 += 97)
    CHECK_FALSE(index_set_membership(FourierIndex::nearest(n1, a), IndexSet::U4, a, 1024, p));

  // recomputation of the defining inequalities on random n_1
  std::mt19937_64 rng(6);
  const double bound = 1024.0 * 1024 * std::pow(std::log(1024.0), 2);
  for (int s : {2, 3, 7}) {
    const FourierParams q = relaxed(1, 1024, s);
    const double thr = std::pow(std::log(1024.0), s);
    for (int k = 0; k < 20000; ++k) {
      const std::int64_t n1 = static_cast<std::int64_t>(rng() % 14'000'000) - 7'000'000;
      if (n1 == 0) continue;
      const double m = std::fabs(static_cast<double>(n1));
      const double prod = m * std::fabs(static_cast<double>(nearest_residue(n1, a[0]).value()));
      const FourierIndex n = FourierIndex::nearest(n1, a);
      CHECK(index_set_membership(n, IndexSet::U2, a, 1024, q) == (m < bound));
      CHECK(index_set_membership(n, IndexSet::U3, a, 1024, q) == (m <= bound && prod > thr));
      CHECK(index_set_membership(n, IndexSet::U4, a, 1024, q) == (m > 1 && m < 1024.0 * 256 && prod > thr));
    }
  }
}

TEST_CASE("U_4 ⊆ U_3 ⊆ U_2 ⊆ U_1 at small N") {
  const AlphaVec a = AlphaVec::random(12, 1);
  const std::int64_t N = 16;
  const auto top = static_cast<std::int64_t>(u1_bound(N));
  for (int s : {0, 1, 2, 7}) {
    const FourierParams q = relaxed(1, N, s);
    for (std::int64_t n1 = -top; n1 <= top; ++n1)
      for (int j = -1; j <= 1; ++j) {
        FourierIndex n = FourierIndex::nearest(n1, a);
        n.n[1] += j;
        const bool u1 = index_set_membership(n, IndexSet::U1, a, N, q);
        const bool u2 = index_set_membership(n, IndexSet::U2, a, N, q);
        const bool u3 = index_set_membership(n, IndexSet::U3, a, N, q);
        const bool u4 = index_set_membership(n, IndexSet::U4, a, N, q);
        CHECK((!u4 || u3));
        CHECK((!u3 || u2));
        CHECK((!u2 || u1));
      }
  }
}

TEST_CASE("component sums: vanishing cases and term counts") {
  const AlphaVec a = AlphaVec::random(8, 2);
  const std::int64_t N = 16;
  const FourierParams p = FourierParams::defaults(2, N);
  for (Component c : {Component::full, Component::D1, Component::D2, Component::D3, Component::D4})
    CHECK(component_sum(c, a, 0.0, N, p).value == cplx(0, 0));

  const ComponentReport d4 = component_sum(Component::D4, a, 0.3, N, p);
  CHECK(d4.value == cplx(0, 0));
  CHECK(d4.term_count == 0);

  const double bound = u1_bound(N);
  const auto below = static_cast<std::uint64_t>(std::ceil(bound) - 1);
  CHECK(component_sum(Component::D2, a, 0.3, N, p).term_count == 2 * below);
  CHECK(component_sum(Component::D1, a, 0.3, N, p).term_count == 2 * below * 65 * 65);

  const FourierParams q = relaxed(2, N, 1);
  std::uint64_t expect3 = 0, expect4 = 0;
  for (std::int64_t n1 = -static_cast<std::int64_t>(bound) - 1; n1 <= static_cast<std::int64_t>(bound) + 1; ++n1) {
    if (n1 == 0) continue;
    const FourierIndex n = FourierIndex::nearest(n1, a);
    expect3 += index_set_membership(n, IndexSet::U3, a, N, q) ? 1 : 0;
    expect4 += index_set_membership(n, IndexSet::U4, a, N, q) ? 1 : 0;
  }
  CHECK(component_sum(Component::D3, a, 0.3, N, q).term_count == expect3);
  CHECK(component_sum(Component::D4, a, 0.3, N, q).term_count == expect4);
  CHECK(component_sum(Component::D5, a, 0.3, N, q).term_count == expect4);

  FourierParams small = p;
  small.cutoff_n1 = 10;
  CHECK_THROWS_AS(component_sum(Component::D2, a, 0.3, N, small), std::invalid_argument);
  CHECK_NOTHROW(component_sum(Component::full, a, 0.3, N, small));
  CHECK_THROWS_AS(component_sum(Component::D6, a, 0.3, N, p), std::invalid_argument);
}

TEST_CASE("recombination of D4 from the main terms and exponential sums") {
  for (int d : {1, 2}) {
    const AlphaVec a = AlphaVec::random(30 + d, d);
    const std::int64_t N = 64;
    const FourierParams q = relaxed(d, N, 2);
    const ComponentReport d4 = component_sum(Component::D4, a, 0.3, N, q);
    const ComponentReport d5 = component_sum(Component::D5, a, 0.3, N, q);
    std::vector<ComponentReport> d6;
    for (const auto& m : all_masks(d)) d6.push_back(component_sum(Component::D6, a, 0.3, N, q, m));
    REQUIRE(d4.term_count > 0);
    const cplx rebuilt = recombine_d4(d, d5.value, d6);
    CHECK(std::abs(rebuilt - d4.value) <= 1e-9 * std::abs(d4.value));
  }
}

TEST_CASE("full series converges to the direct average within its tail bound") {
  const AlphaVec a = golden1();
  const std::int64_t N = 16;
  const double direct = averaged_discrepancy_direct(a, 0.3, N, {}).value;
  double last_tail = 1e300;
  for (std::int64_t cutoff : {500, 2000, 8000, 32000}) {
    FourierParams p = FourierParams::defaults(1, N);
    p.cutoff_n1 = cutoff;
    const ComponentReport r = component_sum(Component::full, a, 0.3, N, p);
    CHECK(std::fabs(r.value.real() - direct) <= r.tail_bound);
    CHECK(r.tail_bound < last_tail);
    last_tail = r.tail_bound;
  }
}

TEST_CASE("thread count does not change component sums") {
  const AlphaVec a = AlphaVec::random(2, 2);
  const FourierParams q = relaxed(2, 32, 2);
  for (Component c : {Component::full, Component::D3, Component::D5}) {
    const cplx one = component_sum(c, a, 0.4, 32, q, std::nullopt, 1).value;
    const cplx four = component_sum(c, a, 0.4, 32, q, std::nullopt, 4).value;
    CHECK(one == four);
  }
}

TEST_CASE("pair report partitions D5") {
  for (int d : {1, 2}) {
    const AlphaVec a = AlphaVec::random(40 + d, d);
    const std::int64_t N = 256;
    const FourierParams q = relaxed(d, N, 1);
    const PairReport rep = pair_cancellation_report(a, 0.3, N, q);
    const double d5 = component_sum(Component::D5, a, 0.3, N, q).value.real();
    double total = rep.residual;
    double scale = std::fabs(rep.residual);
    std::uint64_t flagged = 0;
    for (const auto& pr : rep.pairs) {
      total += pr.paired_sum;
      scale += std::fabs(pr.paired_sum);
      CHECK(pr.paired_sum == doctest::Approx(pr.sum_plus + pr.sum_minus));
      CHECK(pr.bound == doctest::Approx(std::pow(rep.delta_N, d + 2)));
      flagged += pr.flagged ? 1 : 0;
      int prod = 1;
      for (int e : pr.eps_plus) prod *= e;
      CHECK(prod == 1);
      CHECK(pr.eps_plus[0] == -pr.eps_minus[0]);
      if (pr.count_plus == 0) CHECK(pr.sum_plus == 0.0);
      // main terms in ε+ are positive, in ε- negative
      CHECK(pr.sum_plus >= 0.0);
      CHECK(pr.sum_minus <= 0.0);
    }
    CHECK(flagged == rep.flagged);
    CHECK(std::fabs(total - d5) <= 1e-12 * std::max(1.0, scale));
    CHECK(std::fabs(rep.d5 - d5) <= 1e-12 * std::max(1.0, scale));
  }
}
