#include "fockshift/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"

namespace fockshift {

DiagonalIntertwiner similarity_diagonal(const WeightSequence& w, const WeightSequence& w2, int N,
                                        const Limits& lim) {
  require(w.n() == w2.n(), "alphabet-mismatch", "weight families use different alphabets");
  const WordTable t = WordTable::build(w.n(), N, lim);

  for (std::size_t i = 1; i < t.space.dim; ++i) {
    const bool za = w.mu(t.words[i]) == 0.0, zb = w2.mu(t.words[i]) == 0.0;
    require(za == zb, "zero-pattern-mismatch",
            "no diagonal similarity: zero patterns differ at \"" + word_to_string(t.words[i]) +
                "\"");
  }

  DiagonalIntertwiner D;
  D.d.assign(t.space.dim, 1.0);
  for (std::size_t i = 1; i < t.space.dim; ++i) {
    const double na = mu_norm(w, t.words[i]);
    if (na == 0.0) continue;  // dead word: keep d = 1
    D.d[i] = mu_norm(w2, t.words[i]) / na;
  }
  D.C1 = *std::min_element(D.d.begin(), D.d.end());
  D.C2 = *std::max_element(D.d.begin(), D.d.end());
  D.cond = D.C2 / D.C1;
  return D;
}

double verify_intertwining(const DiagonalIntertwiner& D, const WeightSequence& w,
                           const WeightSequence& w2, int N, const Limits& lim) {
  require(w.n() == w2.n(), "alphabet-mismatch", "weight families use different alphabets");
  const WordTable t = WordTable::build(w.n(), N, lim);
  require(D.d.size() == t.space.dim, "dim-mismatch",
          "intertwiner length does not match the truncated dimension");
  const int n = w.n();
  const auto& b = t.level_begin;
  double worst = 0.0;
  for (int m = 0; m < N; ++m) {
    const std::size_t lo = b[static_cast<std::size_t>(m)];
    const std::size_t width = b[static_cast<std::size_t>(m) + 1] - lo;
    for (std::size_t r = 0; r < width; ++r) {
      const std::size_t col = lo + r;
      for (int i = 0; i < n; ++i) {
        const std::size_t row =
            b[static_cast<std::size_t>(m) + 1] + static_cast<std::size_t>(i) * width + r;
        const double lhs = D.d[row] * w.mu(t.words[row]);
        const double rhs = w2.mu(t.words[row]) * D.d[col];
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

ContractionResult contraction_weights(const WeightSequence& w, double M, int N,
                                      const Limits& lim) {
  require(M >= 1.0, "bad-bound", "power bound must be >= 1");
  require(N >= 1, "bad-length", "contraction scan needs N >= 1");
  for (int k = 1; k <= N; ++k) {
    const double v = level_row_norm(w, k, N, 1, lim).value;
    require(v <= M, "bound-violated",
            "scanned chain value " + std::to_string(v) + " exceeds the claimed bound at level " +
                std::to_string(k));
  }

  if (w.length_only()) {
    std::vector<double> vlev, gamma{1.0};
    for (int k = 1; k <= N; ++k) {
      const double tcur = w.mu_level(k) * gamma.back();
      vlev.push_back(std::min(tcur, 1.0));
      gamma.push_back(std::max(tcur, 1.0));
    }
    ContractionResult out{WeightSequence::from_levels(w.n(), std::move(vlev), w.zero_beyond_cap()),
                          std::move(gamma), 0.0, 0.0};
    out.gamma_min = *std::min_element(out.gamma.begin(), out.gamma.end());
    out.gamma_max = *std::max_element(out.gamma.begin(), out.gamma.end());
    return out;
  }

  const WordTable t = WordTable::build(w.n(), N, lim);
  std::vector<double> values(t.space.dim, 1.0), gamma(t.space.dim, 1.0);
  for (std::size_t i = 1; i < t.space.dim; ++i) {
    const double tcur = w.mu(t.words[i]) * gamma[t.tail[i]];
    values[i] = std::min(tcur, 1.0);
    gamma[i] = std::max(tcur, 1.0);
  }
  ContractionResult out{WeightSequence::from_index_values(w.n(), N, std::move(values)),
                        std::move(gamma), 0.0, 0.0};
  out.gamma_min = *std::min_element(out.gamma.begin(), out.gamma.end());
  out.gamma_max = *std::max_element(out.gamma.begin(), out.gamma.end());
  return out;
}

}  // namespace fockshift
