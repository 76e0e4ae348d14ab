#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fockshift/limits.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;

// Basis span{e_alpha : |alpha| <= N} with graded-index coordinates.
struct TruncatedFock {
  int n = 0;
  int N = 0;
  std::size_t dim = 0;
};

TruncatedFock make_space(int n, int N, const Limits& lim = default_limits());

// Enumerated basis with tail links (word minus first letter), the workhorse
// for sparse shift actions and chain DP scans.
struct WordTable {
  TruncatedFock space;
  std::vector<Word> words;              // graded-lex order
  std::vector<std::size_t> tail;        // tail[0] = 0
  std::vector<std::size_t> level_begin; // size N+2, level k spans [begin[k], begin[k+1])

  static WordTable build(int n, int N, const Limits& lim = default_limits());
  int level_of(std::size_t idx) const { return static_cast<int>(words[idx].size()); }
};

enum class Side { left, right };

// W_i e_alpha = mu_{g_i alpha} e_{g_i alpha} (left) resp.
// Lambda_i e_alpha = mu~_{alpha g_i} e_{alpha g_i} (right), compressed to the
// truncation: the image of the top level is 0. Right shifts error on words
// whose chain to g0 vanishes (the right weight is undefined there) when the
// input vector actually touches them.
CVec apply_shift(const WordTable& t, const WeightSequence& w, int gen, Side side, bool adjoint,
                 const CVec& v);

// One nonzero per column; zero weights are not stored.
SpMat shift_matrix(const WordTable& t, const WeightSequence& w, int gen, Side side,
                   bool adjoint = false);

// sup of mu(beta, alpha) over |beta| = k, |beta| + |alpha| <= N. The square of
// `value` is the operator norm of sum_{|beta|=k} W_beta W_beta* on the
// truncation (the operator is diagonal with entries mu(beta, alpha)^2).
struct LevelNorm {
  int k = 0;
  int N = 0;
  double value = 0.0;
  Word beta, alpha;  // attaining pair
  // Restriction of the scan to the deepest admissible level |alpha| = N - k,
  // i.e. the entries the next truncation step would lose.
  double boundary_value = 0.0;
  Word boundary_beta, boundary_alpha;
};

LevelNorm level_row_norm(const WeightSequence& w, int k, int N, int threads = 1,
                         const Limits& lim = default_limits());

// Exact sup over the full (untruncated) index set, for families where the
// supremum has a closed form.
std::optional<double> certified_level_value(const WeightSequence& w, int k);

// ||sum_{|beta|=k} W_beta W_beta*|| from materialized matrices: the dense
// test oracle for the diagonal sup formula.
double dense_level_norm(const WordTable& t, const WeightSequence& w, int k);

struct RadiusReport {
  int N = 0;
  std::vector<double> level_values;  // sup mu(beta, alpha), k = 1..N
  std::vector<double> roots;         // level_values[k]^{1/k}
  double estimate = 0.0;             // max over the trailing window of roots
  std::optional<double> exact;       // closed-form limit where known
  std::string note;
};

// Level-norm roots on the truncation. Truncated sups bound the per-level sups
// from below, but the limsup may still undershoot early terms, so `estimate`
// is a window statistic, not a certified bound; `exact` is only set for
// families with a known closed-form radius.
RadiusReport joint_radius_estimate(const WeightSequence& w, int N, int threads = 1,
                                   const Limits& lim = default_limits());

struct GeneratorEvidence {
  int gen = 0;
  double sup_mu = 0.0;                 // sup mu_{g_i alpha} over the scan
  std::vector<double> level_max;       // per |alpha| = 0..N-1
  double l1_partial = 0.0;             // sum of mu_{g_i alpha} over the scan
  double l2_partial = 0.0;             // sum of squares
  std::string compact_verdict;         // decaying-evidence | non-decaying | undetermined
  std::string l2_verdict;              // summable-evidence | divergent-evidence | undetermined
  std::vector<double> defect_min;      // diagonal of W_i*W_i - sum_j W_j W_j*, per level
  std::vector<double> defect_max;
};

struct ClassifyReport {
  int N = 0;
  bool injective = false;
  bool row_contraction = false;
  double scan_sup_chain = 0.0;         // sup mu(beta, alpha) over all scanned levels
  std::optional<double> bound_M;
  std::optional<bool> power_bounded_within_scan;
  std::vector<GeneratorEvidence> generators;
};

ClassifyReport classify(const WeightSequence& w, int N, std::optional<double> M = std::nullopt,
                        const Limits& lim = default_limits());

struct Component {
  std::vector<std::size_t> indices;  // graded indices, ascending
  bool truncated_type = false;       // a zero-weight extension exists inside the scan
};

struct DecomposeReport {
  int N = 0;
  bool pattern_valid = false;  // nonzero support suffix-closed within the scan
  std::vector<Component> components;
};

// Connected components of the graph on basis words with an edge
// gamma -- g_i gamma whenever mu_{g_i gamma} != 0; each component spans a
// reducing subspace of the truncated tuple.
DecomposeReport reduce_decompose(const WeightSequence& w, int N,
                                 const Limits& lim = default_limits());

}  // namespace fockshift
