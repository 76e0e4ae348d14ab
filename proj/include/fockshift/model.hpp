#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fockshift/limits.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

// A tuple T = (T_1, ..., T_n) of d x d matrices acting on C^d.
struct OperatorTuple {
  int n = 0;
  int d = 0;
  std::vector<Eigen::MatrixXcd> T;
};

// Validates shapes and returns the tuple. Errors: bad-alphabet, bad-dimension,
// shape-mismatch.
OperatorTuple make_tuple(int n, int d, std::vector<Eigen::MatrixXcd> mats);

// Max |(T_i T_j - T_j T_i)_{ab}| <= tol for all pairs.
bool is_commuting(const OperatorTuple& t, double tol = 1e-10);

// Level data of the completely positive map phi(X) = sum_i T_i X T_i*.
struct TupleStats {
  std::vector<double> level_norms;  // h_k = ||phi^k(I)||, k = 0..kmax (h_0 = 1)
  std::vector<double> log_norms;    // log h_k (-inf once nilpotent), overflow-safe
  std::vector<double> roots;        // h_k^(1/2k), k = 1..kmax, from the logs
  double r_estimate = 0.0;          // max over the trailing window of roots
  std::optional<int> nilpotent_index;  // first k with h_k = 0, if within the scan
};

// Iterates phi with per-step normalisation so large/small norms cannot
// overflow the scan. kmax >= 1.
TupleStats tuple_stats(const OperatorTuple& t, int kmax);

// The canonical weights measured from the tuple: chain values
// mu(beta, g0) = (|beta|+1) * h_{|beta|}^(1/2), a length-only table capped at
// kmax (or at the nilpotency index, with exact zeros beyond). The raw h_k
// are kept as calibration data (a_data) so downstream identities can reuse
// the very same floating-point values.
WeightSequence from_tuple_norms(const OperatorTuple& t, int kmax);

// Row-contraction style certificate for K : C^d -> Fock x C^d,
//   K h = sum_alpha (1 / mu(alpha, g0)) e_alpha (x) Q^(1/2) T_alpha* h.
struct ModelCertificate {
  int N = 0;
  Eigen::MatrixXcd K;                  // (dim * d) x d, block row per word
  std::vector<double> residuals;       // ||K T_i* - (W_i* (x) I) K|| per generator
  double lambda_min = 0.0;             // spectral bounds of K*K
  double lambda_max = 0.0;
  double cb_bound = 0.0;               // sqrt(lambda_max / lambda_min)
  std::vector<double> level_term_norms;  // ||sum_{|a|=k} b_a T_a Q T_a*||, k = 0..N
  std::string convergence;             // finite | convergent-evidence | undetermined
};

// Errors: alphabet-mismatch, bad-q (non-Hermitian), not-positive-definite,
// divergence-evidence (level terms growing: T outside the Q-domain of w),
// zero-weight (word weights dead on a live product), resource caps.
ModelCertificate build_K_embedding(const OperatorTuple& t, const WeightSequence& w,
                                   const Eigen::MatrixXcd& Q, int N,
                                   const Limits& lim = default_limits());

enum class ModelMode { rota, main1, nilpotent };

// Closed-form (or measured, for rota) cb bound for the similarity to a
// row contraction, cross-checked against build_K_embedding with the
// tuple-measured weights:
//   rota      sqrt(lambda_max / lambda_min) of K*K for the given Q
//   main1     pi / sqrt(6), any non-nilpotent tuple, Q = I
//   nilpotent sqrt(sum_{k < m} 1/(k+1)^2) for nilpotency index m
// Errors: mode-mismatch (wrong mode for the tuple / missing Q),
// certificate-mismatch (measured cb exceeds the closed form).
double model_bound(const OperatorTuple& t, ModelMode mode, int N,
                   const Eigen::MatrixXcd* Q = nullptr, const Limits& lim = default_limits());

// Weights built from a submultiplicative norm sequence a (a_0 = 1, a_k > 0):
// mu chains interpolate a; kappa is the dyadic comparison sequence
//   kappa(k) = a_1^(1/2) * a_{2^m}^(1/2^{m+1}),  m = floor(log2 k),
// and sigma(k) = a_k / prod_{j<=k} kappa(j) in (0, 1].
struct FpWeights {
  WeightSequence mu;           // interpolated from a
  std::vector<double> a;       // the input sequence, index 0..cap
  std::vector<double> kappa;   // levels 1..cap
  std::vector<double> sigma;   // levels 0..cap (sigma_0 = 1)
  bool quasi_nilpotent_evidence = false;  // trailing roots a_k^(1/k) strictly decreasing
};

// Errors: nilpotent-input (some a_k = 0: the nilpotent model applies instead),
// plus the interpolation validation (not-submultiplicative, bad-weight).
FpWeights foias_pearcy_weights(int n, const std::vector<double>& a);

// As above with a_k measured from the tuple: a_k = h_k^(1/4), clamped to exact
// submultiplicativity (the underlying inequality is a theorem; rounding of the
// measured norms may violate it by ulps).
FpWeights foias_pearcy_weights(const OperatorTuple& t, int kmax);

// Certificate for the diagonal map Y e_beta = sigma_{|beta|} e_beta
// intertwining the mu-shift adjoints with the kappa-shift adjoints.
struct FpCertificate {
  double y_norm = 0.0;        // max sigma = ||Y||, expected <= 1
  double min_sigma = 0.0;     // > 0 iff Y injective on the truncation
  double max_residual = 0.0;  // max over generators of ||Y V_i* - W_i* Y||
  bool kappa_nonincreasing = false;
  bool kappa_dominates_roots = false;  // kappa(k) >= a_k^(1/k) up to 1e-12 relative
  double battery_min_ratio = 0.0;      // min ||Y K h|| / ||h|| over random h (0 without a tuple)
  double battery_pairing_err = 0.0;    // max |<Y K h, e_g0 (x) h> - ||h||^2| over the battery
};

// N <= the cap of fp.mu. When t is given, the K-embedding battery runs with
// the mu weights and Q = I.
FpCertificate foias_pearcy_certify(const FpWeights& fp, int N, const OperatorTuple* t = nullptr,
                                   const Limits& lim = default_limits());

}  // namespace fockshift
