#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equidist/diophantine.hpp"
#include "equidist/exactfrac.hpp"

namespace equidist {

/// Summation parameters. s_exponent is the power in the small-divisor
/// threshold (log N)^s; cutoff_n1 bounds |n_1| for the full series;
/// tail_window is the number K of integers kept on each side of the nearest
/// n_{i+1} when an axis is summed over all of Z.
struct FourierParams {
  int s_exponent = 0;
  std::int64_t cutoff_n1 = 0;
  int tail_window = 32;
  /// Skip the s >= (d+2)d+4 check. At desk-scale N the index set U_4 is
  /// empty for admissible s, so diagnostics run with smaller s.
  bool relaxed = false;

  static int min_s(int d) { return (d + 2) * d + 4; }
  static FourierParams defaults(int d, std::int64_t N);
  void validate(int d) const;
};

/// N²(log N)², the |n_1| range of U_1..U_3.
double u1_bound(std::int64_t N);

/// Index vector (n_1, ..., n_{d+1}).
struct FourierIndex {
  std::vector<std::int64_t> n;

  int dim() const { return static_cast<int>(n.size()) - 1; }
  std::int64_t n1() const { return n.front(); }

  /// n_1 with every n_{i+1} set to the integer nearest n_1 α_i.
  static FourierIndex nearest(std::int64_t n1, const AlphaVec& alpha);
};

/// s ∈ {0,1}^{d+1} \ {0}; sign = (-1)^{Σ s_i}.
struct LinearFormMask {
  std::vector<int> s;

  int sign() const;
  std::string label() const;  // e.g. "101"
  static LinearFormMask parse(std::string_view bits);
};

/// All 2^{d+1} - 1 masks in increasing binary order of the label.
std::vector<LinearFormMask> all_masks(int d);

/// [sin(2π n_1/N²)/(2π n_1/N²)]² ∏ [sin(2π r_i)/(2π r_i)]², r_i = n_1 α_i - n_{i+1}.
double g_factor(const FourierIndex& n, const AlphaVec& alpha, std::int64_t N);

/// (-1)^d i^{d+1}; see term_prefactor_note in fourier_decomp.cpp.
std::complex<double> term_prefactor(int d);

/// One summand of the roof-averaged Poisson series:
///   c_d · (1 - e^{2πi n_1 x})/(2π n_1) · [sinc(n_1/N²)]² · ∏ (1 - e^{-2πi N r_i})/(2π r_i) · [sinc(r_i)]²
/// with c_d = term_prefactor(d). Zero residues take their limit values.
std::complex<double> f_term(const FourierIndex& n, double x, const AlphaVec& alpha, std::int64_t N);

/// δ_1 n_1 x - Σ δ_{i+1} N (n_1 α_i - n_{i+1}).
long double lambda_form(const LinearFormMask& mask, const FourierIndex& n, double x, std::int64_t N,
                        const AlphaVec& alpha);

/// The same value reduced mod 1 with exact arithmetic.
UnitFrac lambda_phase(const LinearFormMask& mask, const FourierIndex& n, double x, std::int64_t N,
                      const AlphaVec& alpha);

enum class IndexSet { U1, U2, U3, U4 };

bool index_set_membership(const FourierIndex& n, IndexSet which, const AlphaVec& alpha, std::int64_t N,
                          const FourierParams& params);

enum class Component { full, D1, D2, D3, D4, D5, D6 };

const char* to_string(Component c);
Component parse_component(std::string_view text);

struct ComponentReport {
  std::string id;
  std::optional<LinearFormMask> mask;
  std::complex<double> value;
  std::uint64_t term_count = 0;
  /// Analytic bound on what the finite enumeration leaves out (full D̄ and
  /// D̄_1 only; 0 for the exactly enumerated sets).
  double tail_bound = 0.0;
  /// |D̄_k - D̄_{k-1}| in a decomposition, unset otherwise.
  std::optional<double> step_difference;
};

/// Partial sum over one component's index set, |n_1| ascending, + before -,
/// axis windows innermost; compensated and reduced over fixed n_1 blocks.
/// D6 requires a mask.
ComponentReport component_sum(Component which, const AlphaVec& alpha, double x, std::int64_t N,
                              const FourierParams& params, const std::optional<LinearFormMask>& mask = std::nullopt,
                              int threads = 1);

/// D̄, D̄_1..D̄_5 and D̄_6 for every mask, with step differences filled in.
std::vector<ComponentReport> decomposition(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                                           int threads = 1);

/// D̄_4 rebuilt from the main-term sum and the exponential sums:
///   c_d/(2π)^{d+1} · (D̄_5 + Σ_s (-1)^{|s|} D̄_6(s)).
std::complex<double> recombine_d4(int d, std::complex<double> d5, const std::vector<ComponentReport>& d6_by_mask);

struct PairRecord {
  std::vector<int> l;
  std::vector<int> eps_plus;   // divisor sign +
  std::vector<int> eps_minus;  // divisor sign -
  double sum_plus = 0.0;
  double sum_minus = 0.0;
  std::uint64_t count_plus = 0;
  std::uint64_t count_minus = 0;
  double paired_sum = 0.0;
  double bound = 0.0;
  bool flagged = false;
};

struct PairReport {
  double delta_N = 0.0;
  double template_constant = 1.0;
  std::vector<PairRecord> pairs;
  /// U_4 main terms whose bucket lies outside L_2(N).
  double residual = 0.0;
  std::uint64_t residual_terms = 0;
  double d5 = 0.0;
  std::uint64_t flagged = 0;
};

/// Main-term sums of D̄_5 grouped by geometric bucket l ∈ L_2(N) and sign
/// pair (ε vectors that differ in the n_1 sign only). pairs + residual = D̄_5.
PairReport pair_cancellation_report(const AlphaVec& alpha, double x, std::int64_t N, const FourierParams& params,
                                    double template_constant = 1.0, int threads = 1);

/// Nearest residues of n_1 α_i (as reals) for every axis.
std::vector<long double> nearest_residues(std::int64_t n1, const AlphaVec& alpha);

/// Σ e^{2πiΛ(n)} over n_1 in the listed set (n_{i+1} nearest), compensated.
std::complex<double> exponential_sum(const std::vector<std::int64_t>& n1s, const LinearFormMask& mask, double x,
                                     std::int64_t N, const AlphaVec& alpha);

}  // namespace equidist
