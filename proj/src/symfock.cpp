#include "fockshift/symfock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fockshift/errors.hpp"

namespace fockshift {

namespace {

// Multi-indices of total degree deg over n slots, lex ascending.
void append_level(int n, int deg, std::vector<MultiIndex>& out) {
  MultiIndex cur;
  cur.reserve(static_cast<std::size_t>(n));
  const std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      cur.push_back(left);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur.push_back(v);
      rec(pos + 1, left - v);
      cur.pop_back();
    }
  };
  rec(0, deg);
}

void require_multi(int n, const MultiIndex& k) {
  require(static_cast<int>(k.size()) == n, "bad-multiindex",
          "multi-index arity does not match the alphabet");
  for (int v : k) require(v >= 0, "bad-multiindex", "multi-index entries must be >= 0");
}

Complex point_power(const Point& z, const MultiIndex& k) {
  Complex p(1.0, 0.0);
  for (std::size_t i = 0; i < k.size(); ++i)
    for (int j = 0; j < k[i]; ++j) p *= z[i];
  return p;
}

double lambda_max_psd(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

// Same thresholds as the word-side model so the two certificates agree on
// what counts as evidence.
std::string term_verdict(const std::vector<double>& terms) {
  if (terms.back() == 0.0) return "finite";
  if (terms.size() < 4) return "undetermined";
  bool all_small = true, all_big = true;
  for (std::size_t k = terms.size() - 3; k < terms.size(); ++k) {
    if (terms[k - 1] == 0.0) return "finite";
    const double r = terms[k] / terms[k - 1];
    all_small = all_small && r < 0.95;
    all_big = all_big && r >= 1.0;
  }
  if (all_small) return "convergent-evidence";
  if (all_big) {
    fail("divergence-evidence",
         "level terms of the weighted sum keep growing: the tuple lies outside the domain of "
         "these weights");
  }
  return "undetermined";
}

}  // namespace

std::size_t SymmetricBasis::index_of(const MultiIndex& k) const {
  const auto it = position.find(k);
  require(it != position.end(), "bad-multiindex",
          "multi-index " + multi_to_string(k) + " outside the degree cap");
  return it->second;
}

SymmetricBasis build_symmetric_basis(const WeightSequence& w, int D_total, const Limits& lim) {
  require(D_total >= 0 && D_total <= lim.max_N, "resource-cap",
          "degree cap D = " + std::to_string(D_total) + " outside 0.." + std::to_string(lim.max_N));
  SymmetricBasis b;
  b.n = w.n();
  b.D_total = D_total;
  b.level_begin.push_back(0);
  for (int d = 0; d <= D_total; ++d) {
    append_level(b.n, d, b.indices);
    require(b.indices.size() <= lim.max_dim, "resource-cap",
            "lattice dimension exceeds cap " + std::to_string(lim.max_dim));
    b.level_begin.push_back(b.indices.size());
  }
  b.omega.reserve(b.indices.size());
  for (std::size_t i = 0; i < b.indices.size(); ++i) {
    b.omega.push_back(omega_value(w, b.indices[i]));
    b.position.emplace(b.indices[i], i);
  }
  return b;
}

double omega_value(const WeightSequence& w, const MultiIndex& k) {
  require_multi(w.n(), k);
  return class_sum_b(w, k);
}

CVec y_vector(const WeightSequence& w, const MultiIndex& k, int N, const Limits& lim) {
  require_multi(w.n(), k);
  require(total_degree(k) <= N, "bad-length", "multi-index degree exceeds the truncation level");
  check_space_cap(w.n(), N, lim);
  require(multinomial(k) <= static_cast<double>(lim.max_dim), "resource-cap",
          "abelianization class too large to materialise");
  const double omega = omega_value(w, k);
  CVec y = CVec::Zero(static_cast<Eigen::Index>(graded_dim(w.n(), N)));
  for (const Word& word : words_in_class(k)) {
    const double mn = mu_norm(w, word);
    require(mn > 0.0, "zero-weight",
            "class vector undefined over the dead word \"" + word_to_string(word) + "\"");
    y(static_cast<Eigen::Index>(graded_index(word, w.n()))) = 1.0 / (omega * mn);
  }
  return y;
}

SpMat commuting_shift_matrix(const SymmetricBasis& b, int gen) {
  require(gen >= 1 && gen <= b.n, "bad-word", "generator index outside 1..n");
  const Eigen::Index count = static_cast<Eigen::Index>(b.indices.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t idx = 0; idx < b.indices.size(); ++idx) {
    if (total_degree(b.indices[idx]) == b.D_total) continue;  // compressed at the cap
    MultiIndex up = b.indices[idx];
    up[static_cast<std::size_t>(gen - 1)] += 1;
    const std::size_t target = b.index_of(up);
    trips.emplace_back(static_cast<int>(target), static_cast<int>(idx),
                       std::sqrt(b.omega[idx] / b.omega[target]));
  }
  SpMat m(count, count);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

double compression_check(const WeightSequence& w, int gen, int D_total, int N, const Limits& lim) {
  require(gen >= 1 && gen <= w.n(), "bad-word", "generator index outside 1..n");
  require(N >= D_total + 1, "bad-length",
          "the ambient truncation must exceed the degree cap (N >= D_total + 1)");
  const SymmetricBasis b = build_symmetric_basis(w, D_total, lim);
  const WordTable table = WordTable::build(w.n(), N, lim);
  const SpMat B = commuting_shift_matrix(b, gen);

  std::vector<CVec> ys;
  ys.reserve(b.indices.size());
  for (const MultiIndex& k : b.indices) ys.push_back(y_vector(w, k, N, lim));

  double worst = 0.0;
  for (std::size_t col = 0; col < b.indices.size(); ++col) {
    const CVec image = apply_shift(table, w, gen, Side::left, /*adjoint=*/false, ys[col]);
    for (std::size_t row = 0; row < b.indices.size(); ++row) {
      const Complex fock = ys[row].dot(image);
      const Complex lattice =
          B.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) /
          std::sqrt(b.omega[col] * b.omega[row]);
      worst = std::max(worst, std::abs(fock - lattice));
    }
  }
  return worst;
}

H2Kernel h2_kernel(const WeightSequence& w, const Point& zeta, const Point& lambda, int max_degree,
                   const Limits& lim) {
  (void)lim;
  require(static_cast<int>(zeta.size()) == w.n() && static_cast<int>(lambda.size()) == w.n(),
          "bad-point", "kernel endpoints must have n coordinates");
  require(max_degree >= 0, "bad-length", "kernel expansion needs max_degree >= 0");
  for (const Point& p : {zeta, lambda})
    require(point_membership(w, p).verdict != "non-member", "non-member",
            "kernel endpoint outside the evaluation domain");

  int effective = max_degree;
  if (w.cap() != WeightSequence::no_cap && !w.zero_beyond_cap())
    effective = std::min(effective, w.cap());

  H2Kernel out;
  if (w.length_only()) {
    Complex s(0.0, 0.0);
    for (int i = 0; i < w.n(); ++i)
      s += zeta[static_cast<std::size_t>(i)] * std::conj(lambda[static_cast<std::size_t>(i)]);
    Complex p(1.0, 0.0);
    for (int d = 0; d <= effective; ++d) {
      // sum over |k| = d of multinomial(k) zeta^k conj(lambda)^k = s^d
      out.level_terms.push_back(p == Complex(0.0, 0.0) ? Complex(0.0, 0.0)
                                                       : w.b_level(d) * p);
      p *= s;
    }
  } else {
    for (int d = 0; d <= effective; ++d) {
      Complex term(0.0, 0.0);
      std::vector<MultiIndex> level;
      append_level(w.n(), d, level);
      for (const MultiIndex& k : level) {
        const Complex zp = point_power(zeta, k) * std::conj(point_power(lambda, k));
        if (zp != Complex(0.0, 0.0)) term += class_sum_b(w, k) * zp;
      }
      out.level_terms.push_back(term);
    }
  }
  for (Complex t : out.level_terms) out.value += t;
  return out;
}

CommutativeCertificate commutative_model(const OperatorTuple& t, const WeightSequence& w,
                                         const Eigen::MatrixXcd* Q, int D_total,
                                         const Limits& lim) {
  require(t.n == w.n(), "alphabet-mismatch", "tuple and weights disagree on the alphabet size");
  require(D_total >= 0, "bad-length", "degree cap must be >= 0");
  require(is_commuting(t, 1e-10), "non-commuting",
          "the lattice model needs a commuting tuple (pairwise residual <= 1e-10)");

  Eigen::MatrixXcd q = Q ? *Q : Eigen::MatrixXcd::Identity(t.d, t.d);
  require(q.rows() == t.d && q.cols() == t.d, "shape-mismatch", "Q must match the tuple dimension");
  const double qscale = std::max(1.0, q.cwiseAbs().maxCoeff());
  require((q - q.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * qscale, "bad-q",
          "Q must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> qes(q);
  require(qes.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  require(qes.eigenvalues().minCoeff() >= 1e-12, "not-positive-definite",
          "Q must be positive definite (eigenvalues >= 1e-12)");
  const Eigen::MatrixXcd qh = qes.operatorSqrt();

  // A dead weight tail is data, not an error: the symmetric space simply ends
  // at the last live level, so clamp the lattice there.
  int D = D_total;
  if (w.length_only() && w.zero_beyond_cap()) {
    int live = 0;
    while (live < D && w.norm_level(live + 1) > 0.0) ++live;
    D = live;
  }

  const SymmetricBasis basis = build_symmetric_basis(w, D, lim);
  const std::size_t count = basis.indices.size();
  require(count * static_cast<std::size_t>(t.d) <= lim.max_dim, "resource-cap",
          "model space dimension exceeds the cap");

  // T^k by appending the last positive coordinate's generator on the right.
  std::vector<Eigen::MatrixXcd> powers(count), blocks(count);
  powers[0] = Eigen::MatrixXcd::Identity(t.d, t.d);
  blocks[0] = std::sqrt(basis.omega[0]) * qh;
  for (std::size_t idx = 1; idx < count; ++idx) {
    MultiIndex k = basis.indices[idx];
    int j = basis.n - 1;
    while (k[static_cast<std::size_t>(j)] == 0) --j;
    k[static_cast<std::size_t>(j)] -= 1;
    powers[idx] = powers[basis.index_of(k)] * t.T[static_cast<std::size_t>(j)];
    blocks[idx] = std::sqrt(basis.omega[idx]) * (qh * powers[idx].adjoint());
  }

  CommutativeCertificate cert;
  cert.D_total = D;
  cert.K.setZero(static_cast<Eigen::Index>(count) * t.d, t.d);
  for (std::size_t idx = 0; idx < count; ++idx)
    cert.K.block(static_cast<Eigen::Index>(idx) * t.d, 0, t.d, t.d) = blocks[idx];

  {
    const Eigen::MatrixXcd gram = 0.5 * (Eigen::MatrixXcd(cert.K.adjoint() * cert.K) +
                                         Eigen::MatrixXcd((cert.K.adjoint() * cert.K).adjoint()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, "eigensolver-failed",
            "eigenvalue iteration did not converge");
    cert.lambda_min = es.eigenvalues().minCoeff();
    cert.lambda_max = es.eigenvalues().maxCoeff();
  }
  cert.cb_bound = cert.lambda_min > 0.0 ? std::sqrt(cert.lambda_max / cert.lambda_min)
                                        : std::numeric_limits<double>::infinity();

  // K T_i* minus the lattice-shifted block rows; rows at the degree cap keep
  // only the first term, which vanishes once the tuple power does.
  for (int gen = 1; gen <= t.n; ++gen) {
    const Eigen::MatrixXcd ti_adj = t.T[static_cast<std::size_t>(gen - 1)].adjoint();
    Eigen::MatrixXcd r(cert.K.rows(), t.d);
    for (std::size_t idx = 0; idx < count; ++idx) {
      Eigen::MatrixXcd block = blocks[idx] * ti_adj;
      if (total_degree(basis.indices[idx]) < D) {
        MultiIndex up = basis.indices[idx];
        up[static_cast<std::size_t>(gen - 1)] += 1;
        const std::size_t target = basis.index_of(up);
        block -= std::sqrt(basis.omega[idx] / basis.omega[target]) * blocks[target];
      }
      r.block(static_cast<Eigen::Index>(idx) * t.d, 0, t.d, t.d) = block;
    }
    cert.residuals.push_back(std::sqrt(lambda_max_psd(r.adjoint() * r)));
  }

  for (int d = 0; d <= D; ++d) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.d, t.d);
    for (std::size_t idx = basis.level_begin[static_cast<std::size_t>(d)];
         idx < basis.level_begin[static_cast<std::size_t>(d) + 1]; ++idx)
      m += blocks[idx].adjoint() * blocks[idx];
    cert.level_term_norms.push_back(lambda_max_psd(m));
  }
  cert.convergence = term_verdict(cert.level_term_norms);
  return cert;
}

Eigen::MatrixXcd commutative_calculus(const std::unordered_map<MultiIndex, Complex, WordHash>& coeffs,
                                      const OperatorTuple& t, int N, CesaroMode mode, double tol) {
  require(N >= 0, "bad-length", "calculus needs N >= 0");
  require(is_commuting(t, 1e-10), "non-commuting",
          "the multi-index calculus needs a commuting tuple");
  int deg = 0;
  for (const auto& [k, c] : coeffs) {
    require_multi(t.n, k);
    deg = std::max(deg, total_degree(k));
  }
  const auto power = [&](const MultiIndex& k) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(t.d, t.d);
    for (std::size_t i = 0; i < k.size(); ++i)
      for (int j = 0; j < k[i]; ++j) p *= t.T[i];
    return p;
  };

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.d, t.d);
  if (mode == CesaroMode::fejer) {
    for (const auto& [k, c] : coeffs) {
      const int d = total_degree(k);
      if (d > N) continue;
      m += ((1.0 - static_cast<double>(d) / (static_cast<double>(N) + 1.0)) * c) * power(k);
    }
    return m;
  }
  if (mode == CesaroMode::exact_poly) {
    for (const auto& [k, c] : coeffs) m += c * power(k);
    return m;
  }
  std::vector<double> block_norms;
  for (int d = 0; d <= deg; ++d) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(t.d, t.d);
    for (const auto& [k, c] : coeffs)
      if (total_degree(k) == d) block += c * power(k);
    const double bn = operator_norm(block);
    if (bn < tol && d > 0) return m;
    block_norms.push_back(bn);
    m += block;
  }
  if (block_norms.size() >= 3 && block_norms.back() >= tol) {
    const std::size_t last = block_norms.size() - 1;
    if (block_norms[last] >= block_norms[last - 1] &&
        block_norms[last - 1] >= block_norms[last - 2])
      fail("non-decaying-levels",
           "level blocks do not decay; the series calculus does not apply to this tuple");
  }
  return m;
}

}  // namespace fockshift
