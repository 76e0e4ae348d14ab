#pragma once

#include <vector>

#include "fockshift/limits.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

// Invertible diagonal D e_sigma = d_sigma e_sigma conjugating one weighted
// shift tuple into another: W'_i = D W_i D^{-1}. d is indexed by graded word
// index over the scan truncation; cond = C2/C1 bounds the similarity.
struct DiagonalIntertwiner {
  std::vector<double> d;
  double C1 = 0.0;  // min over the scan (the unit word contributes 1)
  double C2 = 0.0;  // max over the scan
  double cond = 0.0;
};

// d_sigma = mu'(sigma, g0)/mu(sigma, g0) on words with nonzero chains, 1 on
// dead words. Requires matching per-word zero patterns; the dead-branch
// residual is whatever verify_intertwining reports (zero when the two
// families agree there).
DiagonalIntertwiner similarity_diagonal(const WeightSequence& w, const WeightSequence& w2, int N,
                                        const Limits& lim = default_limits());

// max_i max_{|alpha| < N} |d_{g_i alpha} mu_{g_i alpha} - mu'_{g_i alpha} d_alpha|,
// the largest entry of D W_i - W'_i D over the columns the truncation keeps.
double verify_intertwining(const DiagonalIntertwiner& D, const WeightSequence& w,
                           const WeightSequence& w2, int N, const Limits& lim = default_limits());

// Rescaled weights v with v <= 1 (a row contraction) similar to the input
// with condition at most M: v tracks mu until the running chain credit Gamma
// hits the power bound, then clips. Gamma(sigma) = mu(sigma, g0)/v(sigma, g0).
struct ContractionResult {
  WeightSequence v;
  std::vector<double> gamma;  // by level (length-only input) or graded index
  double gamma_min = 0.0;
  double gamma_max = 0.0;
};

// Requires M >= 1 and every scanned chain value <= M; errors with
// "bound-violated" when the scan itself refutes the claimed power bound.
ContractionResult contraction_weights(const WeightSequence& w, double M, int N,
                                      const Limits& lim = default_limits());

}  // namespace fockshift
