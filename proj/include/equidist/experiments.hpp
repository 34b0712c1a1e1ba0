#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "equidist/discrepancy.hpp"
#include "equidist/exactfrac.hpp"
#include "equidist/fourier_decomp.hpp"
#include "equidist/lattice_seq.hpp"
#include "equidist/phi.hpp"

namespace equidist {

/// (log N)^d · φ(log log max(N,16))^e.
double growth_normalizer(int d, std::int64_t N, const PhiSpec& phi, int exponent);

/// True when some α_i has ‖q α_i‖ = 0 for a q <= N.
bool is_degenerate(const AlphaVec& alpha, std::int64_t N);

struct GrowthConfig {
  int d = 1;
  std::vector<std::int64_t> schedule;  // strictly increasing N values
  std::vector<std::uint64_t> seeds;
  PhiSpec phi = PhiSpec::power(1.5);
  std::optional<int> exponent;  // default max(3, d)
  std::uint64_t budget = kDefaultPointBudget;
  int threads = 1;
  bool timing = true;

  int effective_exponent() const { return exponent.value_or(d > 3 ? d : 3); }
  void validate() const;
};

struct GrowthRecord {
  std::uint64_t alpha_seed = 0;
  int d = 0;
  std::int64_t N = 0;
  double delta = 0.0;
  double normalizer = 0.0;
  double ratio = 0.0;
  int exponent = 0;
  double wall_ms = 0.0;  // 0 when timing is off
  bool degenerate = false;
};

/// One record per (seed, N), seeds outer, N inner. α for a seed is
/// AlphaVec::random(seed, d).
std::vector<GrowthRecord> run_growth_experiment(const GrowthConfig& config);

/// Same loop with explicit α vectors, one per seed label.
std::vector<GrowthRecord> run_growth_experiment(const GrowthConfig& config, const std::vector<AlphaVec>& alphas);

/// Largest ratio per N over non-degenerate records.
std::map<std::int64_t, double> max_ratio_by_N(const std::vector<GrowthRecord>& records);

void write_growth_csv(const std::vector<GrowthRecord>& records, std::ostream& out);

struct NormalizedRow {
  std::string name;      // e.g. "D1-D"
  double measured = 0.0; // |left-hand side|
  double normalizer = 0.0;
  double ratio = 0.0;
};

struct CrossValidationOptions {
  PhiSpec phi = PhiSpec::power(1.5);
  std::optional<int> exponent;  // for the D4-D row; default max(3, d)
  double epsilon = 0.1;         // (log N)^{1+ε} in the D-Dbar row
  std::uint64_t mc_samples = 200'000;
  std::uint64_t mc_seed = 0;
  double recombination_tolerance = 1e-9;
};

struct CrossValidation {
  double D_direct = 0.0;
  AveragedResult Dbar_direct;
  bool Dbar_exact = false;
  ComponentReport Dbar_fourier;
  std::vector<ComponentReport> components;  // D1..D5, then D6 per mask
  std::complex<double> d4_recombined;
  double recombination_error = 0.0;  // |D4 - recombined| / max(|D4|, tiny)
  bool recombination_ok = false;
  double dual_path_gap = 0.0;        // |Dbar Fourier - Dbar direct|
  double dual_path_allowance = 0.0;  // tail bound + direct error bound + 1e-6
  bool dual_path_ok = false;
  std::vector<NormalizedRow> normalized;
};

/// Direct D, direct and Fourier D̄, every component sum, the recombination
/// check and each difference divided by its growth normalizer.
CrossValidation cross_validate(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                               const CrossValidationOptions& opts = {}, int threads = 1);

}  // namespace equidist
