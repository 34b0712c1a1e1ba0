#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "equidist/exactfrac.hpp"
#include "equidist/lattice_seq.hpp"

namespace equidist {

/// Which one-sided limit at a jump point attains the supremum. left_limit:
/// x increases to the jump (the point itself is not yet counted).
/// right_limit: x decreases to the jump (the point is counted).
enum class JumpSide { left_limit, right_limit };

const char* to_string(JumpSide side);

struct DiscrepancyResult {
  double delta = 0.0;
  double argmax_x = 0.0;
  UnitFrac argmax_word;
  JumpSide side = JumpSide::right_limit;
  std::uint64_t jump_index = 0;  // 1-based rank of the attaining point
  std::uint64_t points = 0;
};

/// count - M·y with the product M·y formed exactly; the only rounding is
/// the final conversion. Shared by every jump-side evaluation so that equal
/// inputs give bit-identical values.
double jump_value(std::uint64_t count, UnitFrac y, std::uint64_t M);

/// D(α,x;N) = #{points in [0,x)} - N^d·x for x ∈ [0,1].
double discrepancy_at(const AlphaVec& alpha, double x, std::int64_t N, std::uint64_t budget = kDefaultPointBudget,
                      int threads = 1);

/// Stable LSD radix sort on the high word, then full-width ordering inside
/// runs that share a high word.
void sort_words(std::vector<UnitFrac>& words);

/// Δ from an ascending point list: max over j of max(M·y_j - (j-1), j - M·y_j).
DiscrepancyResult max_discrepancy_sorted(std::span<const UnitFrac> sorted);

DiscrepancyResult max_discrepancy(const AlphaVec& alpha, std::int64_t N, std::uint64_t budget = kDefaultPointBudget,
                                  int threads = 1);

/// Hits of {Σ k_i α_i} in [a, b) mod 1 over the windows u_i < k_i <= u_i + N,
/// minus N^d·(b - a).
double oscillated_discrepancy(const AlphaVec& alpha, double a, double b, std::span<const double> u, std::int64_t N,
                              std::uint64_t budget = kDefaultPointBudget);

enum class AverageMode { exact_sweep, monte_carlo };

struct AverageOptions {
  AverageMode mode = AverageMode::exact_sweep;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct AveragedResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::uint64_t evaluations = 0;
};

/// Roof-kernel average of the oscillated discrepancy over u1 ∈ [-2/N², 2/N²]
/// and u_i ∈ [-2, 2]. Exact sweep (d ≤ 2, N ≤ 64) integrates each point's
/// hit indicator against the kernel in closed form; Monte Carlo reports a
/// 3σ standard-error bound.
AveragedResult averaged_discrepancy_direct(const AlphaVec& alpha, double x, std::int64_t N, const AverageOptions& opts,
                                           int threads = 1);

/// Mass of the normalized product kernel, evaluated through the same
/// window weights and CDF the exact sweep uses. Equal to 1.
double roof_weight_total(int d, std::int64_t N);

/// Probability mass of each integer window offset j ∈ {-2,-1,0,1} under
/// the normalized roof on [-2,2]: {1/8, 3/8, 3/8, 1/8}.
inline constexpr double kWindowWeights[4] = {0.125, 0.375, 0.375, 0.125};

/// CDF of the normalized triangle kernel on [-h, h].
double roof_cdf(double t, double h);

}  // namespace equidist
