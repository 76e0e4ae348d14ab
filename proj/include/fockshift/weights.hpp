#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fockshift/freeword.hpp"

namespace fockshift {

// Weight data for the shift tuple: a total map beta -> mu_beta >= 0 on words
// of length >= 1 (mu of the unit word is 1 by convention). Zeros are exact
// user data, never a tolerance threshold: the reducing-subspace decomposition
// is combinatorial in the zero pattern.
enum class WeightKind {
  unit,            // mu = 1
  besov,           // mu at level k = sqrt(k/(s+k-1)), s > 0
  dirichlet,       // mu at level k = (k/(k+1))^(s/2)
  harmonic,        // (k+1)/k
  harmonic_sq,     // ((k+1)/k)^2
  inverse_square,  // 1/(k+1)^2
  constant,        // rho
  interpolated,    // level ratios a_k/a_{k-1} of a submultiplicative sequence
  level_table,     // explicit per-level values (e.g. model weights from a tuple)
  series,          // b-coefficients of 1 + sum_k C(s+k-1,k) phi^k
  tabulated,       // explicit word table (user data)
  indexed,         // values per graded index (machine-generated word weights)
};

const char* kind_name(WeightKind k);

class WeightSequence {
 public:
  // Sentinel for closed-form families with no level cap.
  static constexpr int no_cap = 1 << 28;

  static WeightSequence unit(int n);
  static WeightSequence besov(int n, double s);
  static WeightSequence dirichlet_scale(int n, double s);
  static WeightSequence harmonic(int n);
  static WeightSequence harmonic_squared(int n);
  static WeightSequence inverse_square(int n);
  static WeightSequence constant(int n, double rho);
  // Word table; missing words up to the cap (= longest tabulated word, or
  // explicit cap if larger) count as exact zeros. Nonzero support must be
  // suffix-closed unless allow_any_pattern (decomposition input) is set.
  static WeightSequence tabulated(int n, std::unordered_map<Word, double, WordHash> table,
                                  bool allow_any_pattern = false, int cap = -1);
  // Length-only values mu(1..cap); zero_beyond extends by exact zeros
  // (nilpotent tail), otherwise evaluation beyond the cap is an error.
  static WeightSequence from_levels(int n, std::vector<double> mu_levels, bool zero_beyond);
  // Length-only weights from explicit chain values mu(alpha, g0) per level
  // (index 0..cap, entry 0 must be 1): norm_level returns the given data
  // unchanged and mu_level the consecutive ratios. `calibration` is optional
  // per-level reference data (e.g. operator level norms the chains were built
  // from), kept verbatim in a_data for consumers that need the raw values.
  static WeightSequence from_chain_levels(int n, std::vector<double> norm_levels, bool zero_beyond,
                                          std::vector<double> calibration = {});
  // Word weights addressed by graded index (length <= cap_len).
  static WeightSequence from_index_values(int n, int cap_len, std::vector<double> values);
  // b_alpha = Z_alpha-coefficient of 1 + sum_k C(s+k-1,k) phi^k, then
  // mu_{g_i alpha} = sqrt(b_alpha / b_{g_i alpha}); phi given by word
  // coefficients d_alpha >= 0 with every d_{g_i} > 0, s >= 1.
  static WeightSequence series(int n, const std::unordered_map<Word, double, WordHash>& phi,
                               double s, int cap_len);

  int n() const { return n_; }
  WeightKind kind() const { return kind_; }
  double param() const { return s_; }
  int cap() const { return cap_; }
  bool zero_beyond_cap() const { return zero_beyond_; }
  // True when mu depends only on |beta| (enables O(1) level arithmetic).
  bool length_only() const;

  double mu(const Word& beta) const;  // beta = g0 returns 1 by convention
  // Length-only accessors (error on word-indexed kinds).
  double mu_level(int k) const;       // k >= 1
  double norm_level(int k) const;     // mu(alpha, g0) for any |alpha| = k
  double b_level(int k) const;        // 1/norm_level(k)^2, computed in closed form
  // Interpolated input sequence including a_0 = 1 (empty otherwise).
  const std::vector<double>& a_data() const { return a_; }

 private:
  WeightSequence(int n, WeightKind kind);

  int n_;
  WeightKind kind_;
  double s_ = 0.0;  // family parameter: besov/dirichlet/series s, constant rho
  int cap_ = no_cap;
  bool zero_beyond_ = false;
  std::vector<double> mu_levels_;    // interpolated / level_table
  std::vector<double> norm_levels_;  // cumulative chains, index 0..cap
  std::vector<double> a_;            // interpolated: a_0..a_cap
  std::unordered_map<Word, double, WordHash> table_;  // tabulated / series
  std::vector<double> by_index_;                      // indexed

  friend WeightSequence interpolate_from_sequence(const std::vector<double>&, int);
  friend class WeightBuilder;
};

// Weights mu_beta := a_{|beta|}/a_{|beta|-1} (a_0 := 1) from a = (a_1, a_2, ...).
// Requires a_k >= 0, submultiplicativity a_{k+m} <= a_k a_m, and a zero
// pattern that is either all-positive or positive up to some p then zero.
// The resulting chain values mu(beta, g0) reproduce a_{|beta|} exactly.
WeightSequence interpolate_from_sequence(const std::vector<double>& a, int n);

// Suffix-chain product mu(beta, alpha): the product of mu over the |beta|
// longest suffixes of beta*alpha; mu(g0, alpha) = 1.
double mu_chain(const WeightSequence& w, const Word& beta, const Word& alpha);
// Chain value for length-only weights as a function of (|beta|, |alpha|).
double mu_chain_level(const WeightSequence& w, int k, int m);
// mu(alpha, g0), the norm of the basis monomial.
double mu_norm(const WeightSequence& w, const Word& alpha);
// b_alpha = 1/mu(alpha, g0)^2; error on zero chains.
double b_weight(const WeightSequence& w, const Word& alpha);
// Right-shift weight mu~_{alpha g_i} = mu(alpha g_i, g0)/mu(alpha, g0).
double mu_right(const WeightSequence& w, const Word& alpha, int i);
// omega_k = sum over the abelianization class Lambda_k of b_alpha.
double class_sum_b(const WeightSequence& w, const MultiIndex& k);

struct GeneratorBound {
  int gen = 0;
  double left_sup = 0.0;   // sup of mu_{g_i alpha} over the scan
  double right_sup = 0.0;  // sup of mu~_{alpha g_i} over the scan
  std::vector<double> left_level_max;   // per |alpha| = 0..max_len-1
  std::vector<double> right_level_max;
  // bounded-within-scan | unbounded-suspected | certified
  std::string verdict;
  std::optional<double> certified_sup;  // closed-form value when known
};

struct BoundednessReport {
  int max_len = 0;
  std::vector<GeneratorBound> generators;
};

// Scan sup of the left weights mu_{g_i alpha} and right weights mu~_{alpha g_i}
// per generator. A finite scan cannot decide boundedness over the whole free
// semigroup, so the verdict is three-valued; closed-form families report the
// exact supremum.
BoundednessReport boundedness_report(const WeightSequence& w, int max_len);

}  // namespace fockshift
