#include <doctest.h>

#include <cmath>
#include <sstream>

#include "equidist/experiments.hpp"

using namespace equidist;

TEST_CASE("phi forms") {
  const PhiSpec p = PhiSpec::power(1.5);
  CHECK(p(4.0) == doctest::Approx(8.0));
  CHECK(p(5.0) > p(4.0));
  const PhiSpec q = PhiSpec::loglog_adjusted(0.1);
  CHECK(q(5.0) > q(4.0));
  CHECK(q(1.0) == doctest::Approx(std::pow(std::log(1 + std::exp(1.0)), 1.1)));
  CHECK(PhiSpec::parse("power:2").parameter() == 2.0);
  CHECK(PhiSpec::parse("loglog:0.25").form() == PhiSpec::Form::loglog_adjusted);
  CHECK(PhiSpec::parse("power:1.5").describe() == "power:1.5");
  CHECK_THROWS_AS(PhiSpec::power(1.0), std::invalid_argument);
  CHECK_THROWS_AS(PhiSpec::loglog_adjusted(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PhiSpec::parse("power"), std::invalid_argument);
  CHECK_THROWS_AS(PhiSpec::parse("cubic:2"), std::invalid_argument);
  CHECK_THROWS_AS(PhiSpec::parse("power:abc"), std::invalid_argument);
  CHECK_THROWS_AS(p(0.5), std::domain_error);
  CHECK(phi_eval(p, 9.0) == doctest::Approx(27.0));
}

TEST_CASE("reciprocal sum of n^1.5 against the Euler-Maclaurin value") {
  const PhiSpec p = PhiSpec::power(1.5);
  double sum = 0.0;
  for (int n = 1000000; n >= 1; --n) sum += 1.0 / p(n);
  // ζ(3/2) - 2/√N + N^{-3/2}/2 - (3/2)N^{-5/2}/12
  const double zeta = 2.6123753486854883433;
  const double N = 1e6;
  const double expect = zeta - 2 / std::sqrt(N) + 0.5 * std::pow(N, -1.5) - 1.5 / 12 * std::pow(N, -2.5);
  CHECK(sum == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("growth normalizer") {
  const PhiSpec p = PhiSpec::power(1.5);
  const double ll16 = std::log(std::log(16.0));
  CHECK(growth_normalizer(2, 16, p, 3) == doctest::Approx(std::pow(std::log(16.0), 2) * std::pow(ll16, 4.5)));
  // log log N is clamped at N = 16
  CHECK(growth_normalizer(1, 4, p, 3) == doctest::Approx(std::log(4.0) * std::pow(ll16, 4.5)));
  CHECK(growth_normalizer(1, 1000, p, 3) > 0.0);
}

TEST_CASE("degenerate detection") {
  CHECK(is_degenerate(AlphaVec({UnitFrac(), golden_frac()}), 16));
  CHECK(is_degenerate(AlphaVec({frac_from_real(0.5)}), 2));
  CHECK_FALSE(is_degenerate(AlphaVec({frac_from_real(0.5)}), 1));
  CHECK(is_degenerate(AlphaVec({frac_from_real(0.375)}), 8));
  CHECK_FALSE(is_degenerate(AlphaVec({frac_from_real(0.375)}), 7));
  CHECK_FALSE(is_degenerate(AlphaVec::random(3, 3), 1 << 20));
}

TEST_CASE("single record is internally consistent") {
  GrowthConfig c;
  c.d = 2;
  c.schedule = {16};
  c.seeds = {5};
  c.timing = false;
  const auto recs = run_growth_experiment(c);
  REQUIRE(recs.size() == 1);
  const GrowthRecord& r = recs[0];
  CHECK(r.alpha_seed == 5);
  CHECK(r.exponent == 3);
  CHECK(r.delta == max_discrepancy(AlphaVec::random(5, 2), 16).delta);
  CHECK(r.normalizer == growth_normalizer(2, 16, c.phi, 3));
  CHECK(r.ratio == r.delta / r.normalizer);
  CHECK(r.wall_ms == 0.0);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("degenerate α is flagged and kept out of the aggregates") {
  GrowthConfig c;
  c.d = 2;
  c.schedule = {4, 8, 16};
  c.seeds = {0, 1};
  c.timing = false;
  const std::vector<AlphaVec> alphas{AlphaVec({UnitFrac(), UnitFrac()}), AlphaVec::random(1, 2)};
  const auto recs = run_growth_experiment(c, alphas);
  REQUIRE(recs.size() == 6);
  for (int k = 0; k < 3; ++k) {
    CHECK(recs[static_cast<std::size_t>(k)].degenerate);
    CHECK(recs[static_cast<std::size_t>(k)].delta == static_cast<double>(c.schedule[static_cast<std::size_t>(k)] * c.schedule[static_cast<std::size_t>(k)]));
  }
  CHECK(recs[0].ratio < recs[1].ratio);
  CHECK(recs[1].ratio < recs[2].ratio);
  const auto maxes = max_ratio_by_N(recs);
  REQUIRE(maxes.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(maxes.at(c.schedule[static_cast<std::size_t>(k)]) == recs[static_cast<std::size_t>(3 + k)].ratio);
}

TEST_CASE("configuration errors") {
  GrowthConfig c;
  c.d = 2;
  c.seeds = {1};
  c.schedule = {32, 16};
  CHECK_THROWS_AS(run_growth_experiment(c), std::invalid_argument);
  c.schedule = {};
  CHECK_THROWS_AS(run_growth_experiment(c), std::invalid_argument);
  c.schedule = {16, 1 << 14};
  CHECK_THROWS_AS(run_growth_experiment(c), SizeError);
}

TEST_CASE("records are reproducible across runs and thread counts") {
  GrowthConfig c;
  c.d = 2;
  c.schedule = {16, 32, 64, 128};
  c.seeds = {1, 2, 3};
  c.timing = false;
  c.threads = 1;
  std::ostringstream a, b;
  write_growth_csv(run_growth_experiment(c), a);
  c.threads = 4;
  write_growth_csv(run_growth_experiment(c), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("alpha_seed,d,N,delta,normalizer,ratio,exponent,wall_ms\n", 0) == 0);
}

TEST_CASE("cross validation at x = 0") {
  const AlphaVec a = AlphaVec::random(2, 1);
  FourierParams p = FourierParams::defaults(1, 16);
  p.s_exponent = 2;
  p.relaxed = true;
  const CrossValidation cv = cross_validate(a, 0.0, 16, p);
  CHECK(cv.D_direct == 0.0);
  CHECK(std::fabs(cv.Dbar_direct.value) < 1e-12);
  CHECK(cv.Dbar_fourier.value == std::complex<double>(0, 0));
  for (int k = 0; k < 4; ++k) CHECK(cv.components[static_cast<std::size_t>(k)].value == std::complex<double>(0, 0));
  CHECK(cv.recombination_ok);
  CHECK(std::abs(cv.d4_recombined) < 1e-12);
}

TEST_CASE("cross validation for the golden ratio") {
  const AlphaVec a({golden_frac()});
  FourierParams p = FourierParams::defaults(1, 32);
  p.s_exponent = 2;
  p.relaxed = true;
  const CrossValidation cv = cross_validate(a, 0.3, 32, p);
  CHECK(cv.Dbar_exact);
  CHECK(cv.dual_path_ok);
  CHECK(cv.recombination_ok);
  CHECK(cv.components.size() == 5 + 3);
  CHECK(cv.components[3].term_count > 0);
  CHECK(cv.normalized.size() == 8);
  for (const auto& row : cv.normalized) {
    CHECK(row.normalizer > 0.0);
    CHECK(row.ratio == doctest::Approx(row.measured / row.normalizer));
  }
  CHECK(cv.normalized[0].measured == doctest::Approx(std::fabs(cv.Dbar_direct.value - cv.D_direct)));
}
