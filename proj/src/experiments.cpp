#include "equidist/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace equidist {

namespace {

int count_trailing_zeros(u128 v) {
  const auto lo = static_cast<std::uint64_t>(v);
  if (lo != 0) return __builtin_ctzll(lo);
  return 64 + __builtin_ctzll(static_cast<std::uint64_t>(v >> 64));
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double growth_normalizer(int d, std::int64_t N, const PhiSpec& phi, int exponent) {
  if (N < 2) throw std::invalid_argument("growth normalizer needs N >= 2");
  const double logN = std::log(static_cast<double>(N));
  const double ll = std::log(std::log(static_cast<double>(std::max<std::int64_t>(N, 16))));
  return std::pow(logN, d) * std::pow(phi(ll), exponent);
}

bool is_degenerate(const AlphaVec& alpha, std::int64_t N) {
  for (int i = 0; i < alpha.dim(); ++i) {
    const u128 raw = alpha[i].raw;
    if (raw == 0) return true;
    // raw/2^128 in lowest terms has denominator 2^(128 - ctz).
    const int bits = 128 - count_trailing_zeros(raw);
    if (bits <= 62 && (std::int64_t(1) << bits) <= N) return true;
  }
  return false;
}

void GrowthConfig::validate() const {
  if (d < 1) throw std::invalid_argument("growth: d must be >= 1");
  if (schedule.empty()) throw std::invalid_argument("growth: empty N schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 2) throw std::invalid_argument("growth: N values must be >= 2");
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw std::invalid_argument("growth: N schedule must be increasing");
  }
  checked_point_count(d, schedule.back(), budget);
  if (exponent && *exponent < 1) throw std::invalid_argument("growth: exponent must be >= 1");
}

std::vector<GrowthRecord> run_growth_experiment(const GrowthConfig& config) {
  std::vector<AlphaVec> alphas;
  alphas.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) alphas.push_back(AlphaVec::random(seed, config.d));
  return run_growth_experiment(config, alphas);
}

std::vector<GrowthRecord> run_growth_experiment(const GrowthConfig& config, const std::vector<AlphaVec>& alphas) {
  config.validate();
  if (alphas.size() != config.seeds.size()) throw std::invalid_argument("growth: one alpha per seed required");
  const int e = config.effective_exponent();
  std::vector<GrowthRecord> out;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (alphas[k].dim() != config.d) throw std::invalid_argument("growth: alpha dimension differs from d");
    for (std::int64_t N : config.schedule) {
      const auto t0 = std::chrono::steady_clock::now();
      const DiscrepancyResult res = max_discrepancy(alphas[k], N, config.budget, config.threads);
      const auto t1 = std::chrono::steady_clock::now();
      GrowthRecord r;
      r.alpha_seed = config.seeds[k];
      r.d = config.d;
      r.N = N;
      r.delta = res.delta;
      r.normalizer = growth_normalizer(config.d, N, config.phi, e);
      r.ratio = r.delta / r.normalizer;
      r.exponent = e;
      r.wall_ms = config.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      r.degenerate = is_degenerate(alphas[k], N);
      out.push_back(r);
    }
  }
  return out;
}

std::map<std::int64_t, double> max_ratio_by_N(const std::vector<GrowthRecord>& records) {
  std::map<std::int64_t, double> out;
  for (const auto& r : records) {
    if (r.degenerate) continue;
    auto [it, fresh] = out.try_emplace(r.N, r.ratio);
    if (!fresh) it->second = std::max(it->second, r.ratio);
  }
  return out;
}

void write_growth_csv(const std::vector<GrowthRecord>& records, std::ostream& out) {
  out << "alpha_seed,d,N,delta,normalizer,ratio,exponent,wall_ms\n";
  for (const auto& r : records) {
    out << r.alpha_seed << ',' << r.d << ',' << r.N << ',' << fmt17(r.delta) << ',' << fmt17(r.normalizer) << ','
        << fmt17(r.ratio) << ',' << r.exponent << ',' << fmt17(r.wall_ms) << '\n';
  }
}

CrossValidation cross_validate(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                               const CrossValidationOptions& opts, int threads) {
  const int d = alpha.dim();
  CrossValidation cv;
  cv.D_direct = discrepancy_at(alpha, x, N, kDefaultPointBudget, threads);

  AverageOptions avg;
  cv.Dbar_exact = d <= 2 && N <= 64;
  avg.mode = cv.Dbar_exact ? AverageMode::exact_sweep : AverageMode::monte_carlo;
  avg.samples = opts.mc_samples;
  avg.seed = opts.mc_seed;
  cv.Dbar_direct = averaged_discrepancy_direct(alpha, x, N, avg, threads);

  const auto decomp = decomposition(alpha, x, N, params, threads);
  cv.Dbar_fourier = decomp.front();
  cv.components.assign(decomp.begin() + 1, decomp.end());

  const std::complex<double> d4 = decomp[4].value;
  std::vector<ComponentReport> d6(decomp.begin() + 6, decomp.end());
  cv.d4_recombined = recombine_d4(d, decomp[5].value, d6);
  const double scale = std::max(std::abs(d4), std::numeric_limits<double>::min());
  cv.recombination_error = d4 == 0.0 && cv.d4_recombined == 0.0 ? 0.0 : std::abs(d4 - cv.d4_recombined) / scale;
  cv.recombination_ok = cv.recombination_error <= opts.recombination_tolerance;

  cv.dual_path_gap = std::abs(cv.Dbar_fourier.value - std::complex<double>(cv.Dbar_direct.value, 0.0));
  cv.dual_path_allowance = cv.Dbar_fourier.tail_bound + cv.Dbar_direct.error_bound + 1e-6;
  cv.dual_path_ok = cv.dual_path_gap <= cv.dual_path_allowance;

  const double logN = std::log(static_cast<double>(N));
  const double ll = std::log(std::log(static_cast<double>(std::max<std::int64_t>(N, 16))));
  const double phi_ll = opts.phi(ll);
  const int e = opts.exponent.value_or(std::max(3, d));
  auto row = [&](std::string name, double measured, double normalizer) {
    cv.normalized.push_back({std::move(name), measured, normalizer, measured / normalizer});
  };
  const std::complex<double> dbar = cv.Dbar_fourier.value;
  row("Dbar-D", std::abs(cv.Dbar_direct.value - cv.D_direct), std::pow(logN, 1.0 + opts.epsilon));
  row("D4-Dbar", std::abs(d4 - dbar), std::pow(logN, d) * std::pow(phi_ll, e));
  row("D1-Dbar", std::abs(decomp[1].value - dbar), 1.0);
  row("D2-D1", std::abs(decomp[2].value - decomp[1].value), std::pow(logN, d) * std::pow(phi_ll, d));
  row("D3-D2", std::abs(decomp[3].value - decomp[2].value), std::pow(logN, d) * std::pow(phi_ll, d + 1));
  row("D4-D3", std::abs(d4 - decomp[3].value), logN * logN * ll);
  row("D5", std::abs(decomp[5].value), logN);
  double d6max = 0.0;
  for (const auto& r : d6) d6max = std::max(d6max, std::abs(r.value));
  row("D6max", d6max, logN * logN * ll);
  return cv;
}

}  // namespace equidist
