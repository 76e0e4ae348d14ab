#include "fockshift/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fockshift/errors.hpp"

namespace fockshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double abs2(Complex z) { return std::norm(z); }

void require_point(int n, const Point& lambda) {
  require(static_cast<int>(lambda.size()) == n, "bad-point",
          "expected " + std::to_string(n) + " coordinates, got " + std::to_string(lambda.size()));
}

Complex lambda_word(const Point& lambda, const Word& alpha) {
  Complex p(1.0, 0.0);
  for (int c : alpha) p *= lambda[static_cast<std::size_t>(c - 1)];
  return p;
}

// Per-word lambda products and chain norms over a word table, tail recursion.
struct PointTables {
  std::vector<Complex> lam;
  std::vector<double> norm;
};

PointTables point_tables(const WordTable& t, const WeightSequence& w, const Point& lambda) {
  const std::size_t dim = t.words.size();
  PointTables pt{std::vector<Complex>(dim), std::vector<double>(dim)};
  pt.lam[0] = Complex(1.0, 0.0);
  pt.norm[0] = 1.0;
  for (std::size_t i = 1; i < dim; ++i) {
    pt.lam[i] = lambda[static_cast<std::size_t>(t.words[i][0] - 1)] * pt.lam[t.tail[i]];
    pt.norm[i] = w.mu(t.words[i]) * pt.norm[t.tail[i]];
  }
  return pt;
}

// member / non-member / undetermined from the level sums; zero tail = finite.
std::string window_verdict(const std::vector<double>& c, double delta, std::string& method) {
  if (c.back() == 0.0) {
    method = "finite-sum";
    return "member";
  }
  if (c.size() < 5) {
    method = "ratio-window";
    return "undetermined";
  }
  bool all_small = true, all_big = true;
  for (std::size_t k = c.size() - 4; k < c.size(); ++k) {
    if (c[k - 1] == 0.0) {
      method = "finite-sum";
      return "member";
    }
    const double r = c[k] / c[k - 1];
    all_small = all_small && r < 1.0 - delta;
    all_big = all_big && r >= 1.0;
  }
  method = "ratio-window";
  if (all_small) return "member";
  if (all_big) return "non-member";
  return "undetermined";
}

Eigen::MatrixXcd word_product(const OperatorTuple& t, const Word& alpha) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(t.d, t.d);
  for (int c : alpha) p *= t.T[static_cast<std::size_t>(c - 1)];
  return p;
}

}  // namespace

Symbol make_symbol(int n) {
  require(n >= 1, "bad-alphabet", "symbol needs an alphabet of size >= 1");
  return Symbol{n, {}};
}

void symbol_add_term(Symbol& s, const Word& alpha, Complex c) {
  for (int l : alpha)
    require(l >= 1 && l <= s.n, "bad-word",
            "letter " + std::to_string(l) + " outside 1.." + std::to_string(s.n));
  const auto it = s.coeffs.find(alpha);
  const Complex v = (it == s.coeffs.end() ? Complex(0.0, 0.0) : it->second) + c;
  if (v == Complex(0.0, 0.0)) {
    if (it != s.coeffs.end()) s.coeffs.erase(it);
  } else {
    s.coeffs[alpha] = v;
  }
}

Complex symbol_coeff(const Symbol& s, const Word& alpha) {
  const auto it = s.coeffs.find(alpha);
  return it == s.coeffs.end() ? Complex(0.0, 0.0) : it->second;
}

Symbol symbol_add(const Symbol& a, const Symbol& b) {
  require(a.n == b.n, "alphabet-mismatch", "symbols live over different alphabets");
  Symbol r = a;
  for (const auto& [word, c] : b.coeffs) symbol_add_term(r, word, c);
  return r;
}

Symbol symbol_scale(const Symbol& a, Complex c) {
  Symbol r = make_symbol(a.n);
  if (c == Complex(0.0, 0.0)) return r;
  for (const auto& [word, v] : a.coeffs) r.coeffs[word] = c * v;
  return r;
}

Symbol symbol_multiply(const Symbol& a, const Symbol& b) {
  require(a.n == b.n, "alphabet-mismatch", "symbols live over different alphabets");
  Symbol r = make_symbol(a.n);
  for (const auto& [wa, ca] : a.coeffs)
    for (const auto& [wb, cb] : b.coeffs) {
      Word prod = wa;
      prod.insert(prod.end(), wb.begin(), wb.end());
      symbol_add_term(r, prod, ca * cb);
    }
  return r;
}

int symbol_degree(const Symbol& s) {
  int deg = -1;
  for (const auto& [word, c] : s.coeffs) deg = std::max(deg, static_cast<int>(word.size()));
  return deg;
}

double hol0_level_root(const Symbol& s, int k) {
  require(k >= 1, "bad-length", "level roots need k >= 1");
  double sum = 0.0;
  for (const auto& [word, c] : s.coeffs)
    if (static_cast<int>(word.size()) == k) sum += abs2(c);
  return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / (2.0 * static_cast<double>(k)));
}

double hol0_estimate(const Symbol& s) {
  const int deg = symbol_degree(s);
  if (deg < 1) return 0.0;
  double est = 0.0;
  for (int k = std::max(1, deg - 2); k <= deg; ++k) est = std::max(est, hol0_level_root(s, k));
  return est;
}

PointEvalResult point_membership(const WeightSequence& w, const Point& lambda, int max_level,
                                 double delta) {
  require_point(w.n(), lambda);
  require(max_level >= 1, "bad-length", "membership scan needs max_level >= 1");
  require(delta > 0.0 && delta < 1.0, "bad-tolerance", "ratio threshold needs 0 < delta < 1");
  PointEvalResult r;
  r.lambda = lambda;
  r.max_level = max_level;
  r.delta = delta;
  double s = 0.0;
  for (Complex z : lambda) s += abs2(z);

  // Families with a known domain are decided exactly; everything else goes
  // through the windowed ratio test on the level sums.
  std::string closed;
  if (w.kind() == WeightKind::unit) closed = s < 1.0 ? "member" : "non-member";
  if (w.kind() == WeightKind::harmonic_sq) closed = s <= 1.0 ? "member" : "non-member";
  if (w.kind() == WeightKind::inverse_square) closed = s == 0.0 ? "member" : "non-member";
  if (closed.empty() && w.length_only() && w.zero_beyond_cap())
    closed = s == 0.0 ? "member" : "non-member";  // dead tail admits only 0

  int effective = max_level;
  if (w.cap() != WeightSequence::no_cap && !w.zero_beyond_cap())
    effective = std::min(effective, w.cap());

  if (w.length_only()) {
    for (int k = 0; k <= effective; ++k) {
      const double p = std::pow(s, k);  // multinomial identity collapses the class sums
      if (k > w.cap() || w.norm_level(k) == 0.0) {
        r.level_sums.push_back(p == 0.0 ? 0.0 : kInf);
        continue;
      }
      r.level_sums.push_back(p == 0.0 ? 0.0 : w.b_level(k) * p);
    }
  } else {
    const WordTable t = WordTable::build(w.n(), effective);
    const PointTables pt = point_tables(t, w, lambda);
    r.level_sums.assign(static_cast<std::size_t>(effective) + 1, 0.0);
    for (std::size_t i = 0; i < t.words.size(); ++i) {
      if (pt.lam[i] == Complex(0.0, 0.0)) continue;
      const std::size_t k = static_cast<std::size_t>(t.level_of(i));
      if (pt.norm[i] == 0.0) {
        r.level_sums[k] = kInf;  // live coordinate over a dead word
        continue;
      }
      r.level_sums[k] += abs2(pt.lam[i]) / (pt.norm[i] * pt.norm[i]);
    }
  }

  double acc = 0.0;
  for (double c : r.level_sums) r.partial_sums.push_back(acc += c);

  if (!closed.empty()) {
    r.verdict = closed;
    r.method = "closed-form";
    return r;
  }
  for (double c : r.level_sums)
    if (c == kInf) {
      r.verdict = "non-member";
      r.method = "closed-form";  // divergence is structural, not a ratio estimate
      return r;
    }
  r.verdict = window_verdict(r.level_sums, delta, r.method);
  return r;
}

CVec kernel_vector(const WeightSequence& w, const Point& lambda, int N, bool truncation_override,
                   const Limits& lim) {
  require_point(w.n(), lambda);
  require(N >= 1, "bad-length", "kernel truncation needs N >= 1");
  if (!truncation_override) {
    const PointEvalResult pm = point_membership(w, lambda, std::max(N + 4, 12));
    require(pm.verdict != "non-member", "non-member",
            "point outside the evaluation domain; pass the truncation override to force a "
            "finite section");
  }
  const WordTable t = WordTable::build(w.n(), N, lim);
  const PointTables pt = point_tables(t, w, lambda);
  CVec z = CVec::Zero(static_cast<Eigen::Index>(t.words.size()));
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    if (pt.lam[i] == Complex(0.0, 0.0)) continue;
    require(pt.norm[i] != 0.0, "zero-weight",
            "kernel coordinate undefined on the dead word \"" + word_to_string(t.words[i]) + "\"");
    z(static_cast<Eigen::Index>(i)) = std::conj(pt.lam[i]) / pt.norm[i];
  }
  return z;
}

Complex evaluate_symbol(const Symbol& f, const Point& lambda) {
  require_point(f.n, lambda);
  Complex sum(0.0, 0.0);
  for (const auto& [word, c] : f.coeffs) sum += c * lambda_word(lambda, word);
  return sum;
}

CVec symbol_to_fock(const Symbol& f, const WeightSequence& w, const WordTable& t) {
  require(f.n == t.space.n && f.n == w.n(), "alphabet-mismatch",
          "symbol, weights and table must share the alphabet");
  require(symbol_degree(f) <= t.space.N, "bad-length",
          "symbol degree exceeds the truncation level");
  CVec v = CVec::Zero(static_cast<Eigen::Index>(t.words.size()));
  for (const auto& [word, c] : f.coeffs)
    v(static_cast<Eigen::Index>(graded_index(word, f.n))) = c * mu_norm(w, word);
  return v;
}

Complex evaluate_fock(const CVec& f, const WeightSequence& w, const Point& lambda,
                      const Limits& lim) {
  require_point(w.n(), lambda);
  int N = 0;
  while (graded_dim(w.n(), N) < static_cast<std::size_t>(f.size()) && N <= lim.max_N) ++N;
  require(graded_dim(w.n(), N) == static_cast<std::size_t>(f.size()), "dim-mismatch",
          "vector length is not a graded dimension for this alphabet");
  const WordTable t = WordTable::build(w.n(), N, lim);
  const PointTables pt = point_tables(t, w, lambda);
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    const Complex fi = f(static_cast<Eigen::Index>(i));
    if (pt.lam[i] == Complex(0.0, 0.0) || fi == Complex(0.0, 0.0)) continue;
    require(pt.norm[i] != 0.0, "zero-weight",
            "pairing undefined on the dead word \"" + word_to_string(t.words[i]) + "\"");
    sum += fi * pt.lam[i] / pt.norm[i];
  }
  return sum;
}

DomainReport tuple_domain_membership(const WeightSequence& w, const OperatorTuple& t,
                                     int max_level, double delta, const Limits& lim) {
  require(w.n() == t.n, "alphabet-mismatch", "tuple and weights disagree on the alphabet size");
  require(max_level >= 1, "bad-length", "domain scan needs max_level >= 1");
  DomainReport rep;
  int effective = max_level;
  if (w.cap() != WeightSequence::no_cap && !w.zero_beyond_cap())
    effective = std::min(effective, w.cap());

  if (w.length_only()) {
    const TupleStats st = tuple_stats(t, effective);
    for (int k = 0; k <= effective; ++k) {
      const double h = st.level_norms[static_cast<std::size_t>(k)];
      if (h == 0.0) {
        rep.level_terms.push_back(0.0);
        continue;
      }
      const bool dead = k > w.cap() || w.norm_level(k) == 0.0;
      rep.level_terms.push_back(dead ? kInf : w.b_level(k) * h);
    }
  } else {
    check_space_cap(t.n, effective, lim);
    std::vector<Eigen::MatrixXcd> sums(static_cast<std::size_t>(effective) + 1,
                                       Eigen::MatrixXcd::Zero(t.d, t.d));
    std::vector<bool> infinite(static_cast<std::size_t>(effective) + 1, false);
    // Depth-first over words, carrying the operator product; structurally zero
    // products contribute nothing even over dead words.
    std::vector<std::pair<Word, Eigen::MatrixXcd>> stack;
    stack.emplace_back(Word{}, Eigen::MatrixXcd::Identity(t.d, t.d));
    while (!stack.empty()) {
      auto [word, p] = std::move(stack.back());
      stack.pop_back();
      const int k = static_cast<int>(word.size());
      if (k > 0) {
        const double mu = mu_norm(w, word);
        if (p.isZero(0.0)) continue;  // dead operator branch: nothing below either
        if (mu == 0.0) {
          infinite[static_cast<std::size_t>(k)] = true;
          continue;
        }
        sums[static_cast<std::size_t>(k)] += (1.0 / (mu * mu)) * (p * p.adjoint());
      }
      if (k == effective) continue;
      for (int i = 1; i <= t.n; ++i) {
        Word ext = word;
        ext.push_back(i);
        stack.emplace_back(std::move(ext), t.T[static_cast<std::size_t>(i - 1)] * p);
      }
    }
    for (int k = 0; k <= effective; ++k) {
      if (infinite[static_cast<std::size_t>(k)]) {
        rep.level_terms.push_back(kInf);
        continue;
      }
      if (k == 0) {
        rep.level_terms.push_back(1.0);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sums[static_cast<std::size_t>(k)],
                                                         Eigen::EigenvaluesOnly);
      rep.level_terms.push_back(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
  }

  double acc = 0.0;
  for (double v : rep.level_terms) rep.partial_sums.push_back(acc += v);
  for (double v : rep.level_terms)
    if (v == kInf) {
      rep.verdict = "divergent-evidence";
      return rep;
    }
  std::string method;
  const std::string v = window_verdict(rep.level_terms, delta, method);
  rep.verdict = v == "non-member" ? "divergent-evidence" : v;
  return rep;
}

Eigen::MatrixXcd cesaro_evaluate(const Symbol& phi, const OperatorTuple& t, int N, CesaroMode mode,
                                 double tol) {
  require(phi.n == t.n, "alphabet-mismatch", "symbol and tuple disagree on the alphabet size");
  require(N >= 0, "bad-length", "calculus needs N >= 0");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.d, t.d);
  if (mode == CesaroMode::fejer) {
    for (const auto& [word, c] : phi.coeffs) {
      const int len = static_cast<int>(word.size());
      if (len > N) continue;
      const double fejer = 1.0 - static_cast<double>(len) / (static_cast<double>(N) + 1.0);
      m += (fejer * c) * word_product(t, word);
    }
    return m;
  }
  if (mode == CesaroMode::exact_poly) {
    for (const auto& [word, c] : phi.coeffs) m += c * word_product(t, word);
    return m;
  }
  // hol0_series: level blocks in order until they fall below tol; rejects a
  // tail of non-decaying blocks as evidence the series would not converge.
  const int deg = symbol_degree(phi);
  std::vector<double> block_norms;
  for (int k = 0; k <= deg; ++k) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(t.d, t.d);
    for (const auto& [word, c] : phi.coeffs)
      if (static_cast<int>(word.size()) == k) block += c * word_product(t, word);
    const double bn = operator_norm(block);
    if (bn < tol && k > 0) return m;
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

Eigen::MatrixXcd symbol_on_shifts(const Symbol& phi, const WeightSequence& w, const WordTable& t) {
  require(phi.n == t.space.n && phi.n == w.n(), "alphabet-mismatch",
          "symbol, weights and table must share the alphabet");
  const Eigen::Index dim = static_cast<Eigen::Index>(t.words.size());
  std::vector<SpMat> gens;
  for (int i = 1; i <= phi.n; ++i) gens.push_back(shift_matrix(t, w, i, Side::left));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [word, c] : phi.coeffs) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (auto it = word.rbegin(); it != word.rend(); ++it)
      p = gens[static_cast<std::size_t>(*it - 1)] * p;
    m += c * p;
  }
  return m;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_radius(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  require(es.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CalculusReport calculus_certificates(const Symbol& phi, const Symbol& psi, const OperatorTuple& t,
                                     const WeightSequence& w, int N, const Limits& lim) {
  CalculusReport rep;
  const Eigen::MatrixXcd a = cesaro_evaluate(phi, t, N, CesaroMode::exact_poly);
  const Eigen::MatrixXcd b = cesaro_evaluate(psi, t, N, CesaroMode::exact_poly);
  const Eigen::MatrixXcd ab = cesaro_evaluate(symbol_multiply(phi, psi), t, N, CesaroMode::exact_poly);
  rep.hom_residual = (ab - a * b).cwiseAbs().maxCoeff();
  rep.r_phi_T = spectral_radius(a);
  const WordTable table = WordTable::build(t.n, N, lim);
  rep.r_phi_W_truncated = spectral_radius(symbol_on_shifts(phi, w, table));
  return rep;
}

std::vector<Symbol> gleason_split(const Symbol& phi) {
  require(symbol_coeff(phi, unit_word()) == Complex(0.0, 0.0), "constant-term",
          "the split needs a vanishing coefficient at the unit word");
  std::vector<Symbol> parts(static_cast<std::size_t>(phi.n), make_symbol(phi.n));
  for (const auto& [word, c] : phi.coeffs) {
    if (word.empty()) continue;  // only an explicit zero entry can land here
    Word tail(word.begin() + 1, word.end());
    symbol_add_term(parts[static_cast<std::size_t>(word[0] - 1)], tail, c);
  }
  return parts;
}

}  // namespace fockshift
