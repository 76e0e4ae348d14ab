#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"
#include "fockshift/model.hpp"
#include "fockshift/symfock.hpp"
#include "fockshift/weights.hpp"

using namespace fockshift;

namespace {

std::string kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.kind();
  }
  return "";
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Commuting by construction: every matrix is a polynomial in one strictly
// upper triangular seed, so products of d factors vanish.
OperatorTuple commuting_nilpotent_tuple(int n, int d, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd seed = Eigen::MatrixXcd::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) seed(r, c) = std::complex<double>(g(rng), g(rng));
  std::vector<Eigen::MatrixXcd> mats;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(d, d);
    for (int j = 1; j < d; ++j) {
      p *= seed;
      m += 0.7 * std::complex<double>(g(rng), g(rng)) * p;
    }
    mats.push_back(std::move(m));
  }
  return make_tuple(n, d, std::move(mats));
}

// Smallest m with every length-m product zero (exists for nilpotent tuples).
int nilpotency_index(const OperatorTuple& t) {
  for (int m = 1; m <= t.d; ++m) {
    double sup = 0.0;
    for (int len = m; len == m; ++len)
      for (std::size_t i = graded_dim(t.n, m - 1); i < graded_dim(t.n, m); ++i) {
        const Word w = word_at(i, t.n);
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(t.d, t.d);
        for (int letter : w) p *= t.T[static_cast<std::size_t>(letter - 1)];
        sup = std::max(sup, p.cwiseAbs().maxCoeff());
      }
    if (sup == 0.0) return m;
  }
  return t.d;
}

OperatorTuple diagonal_tuple(int n, const std::vector<std::vector<Complex>>& diags) {
  const int d = static_cast<int>(diags[0].size());
  std::vector<Eigen::MatrixXcd> mats;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) m(j, j) = diags[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    mats.push_back(std::move(m));
  }
  return make_tuple(n, d, std::move(mats));
}

}  // namespace

TEST_CASE("symmetric basis walks the lattice in graded lex order") {
  const WeightSequence w = WeightSequence::unit(2);
  const SymmetricBasis b = build_symmetric_basis(w, 3);
  CHECK(b.indices.size() == 10);  // C(3+2, 2)
  CHECK(b.level_begin == std::vector<std::size_t>{0, 1, 3, 6, 10});
  CHECK(b.indices[0] == MultiIndex{0, 0});
  CHECK(b.indices[3] == MultiIndex{0, 2});
  CHECK(b.indices[4] == MultiIndex{1, 1});
  CHECK(b.indices[5] == MultiIndex{2, 0});
  for (std::size_t i = 0; i < b.indices.size(); ++i) CHECK(b.index_of(b.indices[i]) == i);
  CHECK(kind_of([&] { (void)b.index_of({4, 0}); }) == "bad-multiindex");
  CHECK(kind_of([&] { (void)build_symmetric_basis(w, 99); }) == "resource-cap");

  const SymmetricBasis one = build_symmetric_basis(WeightSequence::harmonic(1), 5);
  CHECK(one.indices.size() == 6);
  CHECK(one.indices[4] == MultiIndex{4});
}

TEST_CASE("omega sums the class weights: multinomials for flat mu, word sums in general") {
  const WeightSequence flat = WeightSequence::unit(3);
  CHECK(omega_value(flat, {0, 0, 0}) == 1.0);
  CHECK(omega_value(flat, {1, 1, 0}) == 2.0);
  for (int k1 = 0; k1 <= 4; ++k1)
    for (int k2 = 0; k2 + k1 <= 5; ++k2)
      for (int k3 = 0; k1 + k2 + k3 <= 6; ++k3)
        CHECK(omega_value(flat, {k1, k2, k3}) == multinomial({k1, k2, k3}));

  const WeightSequence bes = WeightSequence::besov(2, 1.5);
  for (int k1 = 0; k1 <= 3; ++k1)
    for (int k2 = 0; k1 + k2 <= 5; ++k2)
      CHECK(omega_value(bes, {k1, k2}) ==
            multinomial({k1, k2}) * bes.b_level(k1 + k2));

  // Independent path for a word-dependent family: enumerate, filter, sum.
  std::unordered_map<Word, double, WordHash> phi{{{1}, 1.0}, {{2}, 2.0}};
  const WeightSequence ser = WeightSequence::series(2, phi, 2.0, 8);
  for (const MultiIndex k : {MultiIndex{2, 1}, MultiIndex{0, 3}, MultiIndex{2, 2}}) {
    double brute = 0.0;
    for (std::size_t i = graded_dim(2, total_degree(k) - 1); i < graded_dim(2, total_degree(k)); ++i) {
      const Word word = word_at(i, 2);
      if (abelianize(word, 2) != k) continue;
      const double mn = mu_norm(ser, word);
      brute += 1.0 / (mn * mn);
    }
    CHECK(rel_err(omega_value(ser, k), brute) <= 1e-13);
  }

  CHECK(kind_of([&] { (void)omega_value(flat, {1, 2}); }) == "bad-multiindex");
  CHECK(kind_of([&] { (void)omega_value(flat, {1, -1, 0}); }) == "bad-multiindex");
}

TEST_CASE("class vectors are normalised averages supported on disjoint classes") {
  const WeightSequence flat = WeightSequence::unit(2);
  const CVec y0 = y_vector(flat, {0, 0}, 3);
  CHECK(y0(0) == Complex(1.0, 0.0));
  CHECK(y0.tail(y0.size() - 1).cwiseAbs().maxCoeff() == 0.0);

  const CVec y11 = y_vector(flat, {1, 1}, 3);
  CHECK(y11(static_cast<Eigen::Index>(graded_index({1, 2}, 2))) == Complex(0.5, 0.0));
  CHECK(y11(static_cast<Eigen::Index>(graded_index({2, 1}, 2))) == Complex(0.5, 0.0));
  CHECK(y11.cwiseAbs().sum() == 1.0);

  const WeightSequence har = WeightSequence::harmonic(2);
  for (const MultiIndex k : {MultiIndex{1, 0}, MultiIndex{0, 2}, MultiIndex{2, 1}}) {
    const CVec y = y_vector(har, k, 4);
    CHECK(rel_err(y.squaredNorm() * omega_value(har, k), 1.0) <= 1e-14);
  }
  CHECK(std::abs(y_vector(har, {1, 0}, 4).dot(y_vector(har, {0, 1}, 4))) == 0.0);

  const WeightSequence dead = WeightSequence::from_levels(2, {1.0, 1.0, 0.0}, true);
  CHECK(kind_of([&] { (void)y_vector(dead, {2, 1}, 4); }) == "zero-weight");
  CHECK(kind_of([&] { (void)y_vector(flat, {3, 2}, 4); }) == "bad-length");
}

TEST_CASE("commuting shifts ladder the lattice and commute") {
  // One generator, flat weights: the classical unweighted shift.
  const SymmetricBasis line = build_symmetric_basis(WeightSequence::unit(1), 5);
  const SpMat s = commuting_shift_matrix(line, 1);
  for (int k = 0; k < 5; ++k) CHECK(s.coeff(k + 1, k) == 1.0);
  CHECK(s.norm() == std::sqrt(5.0));  // exactly five unit entries

  const SymmetricBasis b = build_symmetric_basis(WeightSequence::harmonic(2), 4);
  const SpMat b1 = commuting_shift_matrix(b, 1);
  const SpMat b2 = commuting_shift_matrix(b, 2);
  CHECK(b1.coeff(static_cast<Eigen::Index>(b.index_of({1, 0})), 0) ==
        std::sqrt(b.omega[0] / b.omega[b.index_of({1, 0})]));
  CHECK(Eigen::MatrixXd(b1 * b2 - b2 * b1).cwiseAbs().maxCoeff() <= 1e-15);

  // Non-trivial lattice weights even for flat mu: sqrt of multinomial ratios.
  const SymmetricBasis flat = build_symmetric_basis(WeightSequence::unit(2), 3);
  const SpMat f1 = commuting_shift_matrix(flat, 1);
  CHECK(f1.coeff(static_cast<Eigen::Index>(flat.index_of({1, 1})),
                 static_cast<Eigen::Index>(flat.index_of({0, 1}))) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  // Adjoint rows reproduce the coordinate eigenvector identity below the cap.
  const int D = 6;
  const SymmetricBasis big = build_symmetric_basis(WeightSequence::harmonic(2), D);
  const Point lam{Complex(0.3, 0.1), Complex(0.0, -0.2)};
  CVec z(static_cast<Eigen::Index>(big.indices.size()));
  for (std::size_t i = 0; i < big.indices.size(); ++i) {
    Complex p(1.0, 0.0);
    for (std::size_t c = 0; c < lam.size(); ++c)
      for (int j = 0; j < big.indices[i][c]; ++j) p *= lam[c];
    z(static_cast<Eigen::Index>(i)) = std::sqrt(big.omega[i]) * std::conj(p);
  }
  for (int gen = 1; gen <= 2; ++gen) {
    const CVec img = commuting_shift_matrix(big, gen).transpose() * z;
    for (std::size_t i = 0; i < big.level_begin[D]; ++i)
      CHECK(std::abs(img(static_cast<Eigen::Index>(i)) -
                     std::conj(lam[static_cast<std::size_t>(gen - 1)]) *
                         z(static_cast<Eigen::Index>(i))) <= 1e-14);
  }

  CHECK(kind_of([&] { (void)commuting_shift_matrix(b, 3); }) == "bad-word");
}

TEST_CASE("lattice matrices are the compressions of the ambient shifts") {
  CHECK(compression_check(WeightSequence::unit(2), 1, 3, 4) <= 1e-12);
  CHECK(compression_check(WeightSequence::unit(2), 2, 3, 4) <= 1e-12);
  CHECK(compression_check(WeightSequence::harmonic(2), 1, 3, 5) <= 1e-10);
  CHECK(compression_check(WeightSequence::besov(2, 1.5), 2, 2, 4) <= 1e-10);
  CHECK(kind_of([&] { (void)compression_check(WeightSequence::unit(2), 1, 3, 3); }) ==
        "bad-length");
}

TEST_CASE("kernel expansion: geometric closed form and level pairing") {
  const WeightSequence flat = WeightSequence::unit(2);
  const Point origin{Complex(0.0, 0.0), Complex(0.0, 0.0)};
  const H2Kernel at0 = h2_kernel(flat, origin, origin, 8);
  CHECK(at0.value == Complex(1.0, 0.0));
  CHECK(at0.level_terms.size() == 9);

  std::mt19937 rng(402);
  std::uniform_real_distribution<double> u(-0.35, 0.35);
  for (int trial = 0; trial < 10; ++trial) {
    const Point zeta{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
    const Point lam{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
    Complex s(0.0, 0.0);
    for (int i = 0; i < 2; ++i)
      s += zeta[static_cast<std::size_t>(i)] * std::conj(lam[static_cast<std::size_t>(i)]);
    const H2Kernel k = h2_kernel(flat, zeta, lam, 40);
    CHECK(std::abs(k.value - 1.0 / (1.0 - s)) <= 1e-10);
  }

  // Level terms pair off against the coordinate vectors of the two points.
  for (const WeightSequence& w :
       {WeightSequence::harmonic(2),
        WeightSequence::series(2, {{{1}, 1.0}, {{2}, 0.5}}, 1.0, 8)}) {
    const int N = 6;
    const WordTable t = WordTable::build(2, N);
    const Point zeta{Complex(0.3, -0.1), Complex(0.15, 0.2)};
    const Point lam{Complex(-0.2, 0.1), Complex(0.25, 0.05)};
    const CVec zz = kernel_vector(w, zeta, N);
    const CVec zl = kernel_vector(w, lam, N);
    const H2Kernel k = h2_kernel(w, zeta, lam, N);
    for (int d = 0; d <= N; ++d) {
      const Eigen::Index lo = static_cast<Eigen::Index>(t.level_begin[static_cast<std::size_t>(d)]);
      const Eigen::Index hi = static_cast<Eigen::Index>(t.level_begin[static_cast<std::size_t>(d) + 1]);
      const Complex level = zz.segment(lo, hi - lo).dot(zl.segment(lo, hi - lo));
      CHECK(std::abs(k.level_terms[static_cast<std::size_t>(d)] - level) <= 1e-12);
    }
  }

  // Gram positivity across a small cloud of points.
  const WeightSequence har = WeightSequence::harmonic(2);
  std::vector<Point> cloud;
  for (int i = 0; i < 5; ++i)
    cloud.push_back({Complex(u(rng), u(rng)), Complex(u(rng), u(rng))});
  Eigen::MatrixXcd gram(5, 5);
  for (int a = 0; a < 5; ++a)
    for (int c = 0; c < 5; ++c)
      gram(a, c) = h2_kernel(har, cloud[static_cast<std::size_t>(a)],
                             cloud[static_cast<std::size_t>(c)], 30)
                       .value;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (gram + gram.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  const Point outside{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  CHECK(kind_of([&] { (void)h2_kernel(flat, origin, outside, 6); }) == "non-member");
  CHECK(kind_of([&] { (void)h2_kernel(flat, {Complex(0.1, 0.0)}, origin, 6); }) == "bad-point");
}

TEST_CASE("lattice model: zero tuple collapses to the ground block") {
  OperatorTuple t = make_tuple(2, 2,
                               {Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(2, 2)});
  const WeightSequence w = from_tuple_norms(t, 1);
  const CommutativeCertificate cm = commutative_model(t, w, nullptr, 1);
  CHECK(cm.D_total == 0);  // dead tail clamps the lattice to the live level
  CHECK(cm.K.rows() == 2);
  CHECK((cm.K - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(cm.residuals == std::vector<double>{0.0, 0.0});
  CHECK(rel_err(cm.cb_bound, 1.0) <= 1e-14);
  CHECK(cm.level_term_norms.size() == 1);
}

TEST_CASE("lattice model matches the word-side certificate on commuting nilpotents") {
  std::mt19937 rng(501);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const OperatorTuple t = commuting_nilpotent_tuple(2, d, rng);
    const int m = nilpotency_index(t);
    if (m < 2) continue;  // degenerate draw; nothing to ladder
    const WeightSequence w = from_tuple_norms(t, m);
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(d, d);
    const ModelCertificate word_side = build_K_embedding(t, w, q, m - 1);
    const CommutativeCertificate cm = commutative_model(t, w, nullptr, m - 1);

    CHECK(cm.D_total == m - 1);
    for (double r : cm.residuals) CHECK(r <= 1e-12);
    CHECK(rel_err(cm.cb_bound, word_side.cb_bound) <= 1e-12);
    CHECK(rel_err(cm.lambda_min, word_side.lambda_min) <= 1e-12);
    CHECK(rel_err(cm.lambda_max, word_side.lambda_max) <= 1e-12);

    double closed = 0.0;
    for (int k = 0; k < m; ++k) closed += 1.0 / ((k + 1.0) * (k + 1.0));
    CHECK(cm.cb_bound <= std::sqrt(closed) + 1e-12);
    for (std::size_t k = 0; k < cm.level_term_norms.size(); ++k)
      CHECK(rel_err(cm.level_term_norms[k], 1.0 / ((k + 1.0) * (k + 1.0))) <= 1e-9);
  }
}

TEST_CASE("lattice model rejects what it cannot certify") {
  OperatorTuple bad = make_tuple(
      2, 2,
      {(Eigen::MatrixXcd(2, 2) << 0, 1, 0, 0).finished(),
       (Eigen::MatrixXcd(2, 2) << 0, 0, 1, 0).finished()});
  CHECK(kind_of([&] {
          (void)commutative_model(bad, WeightSequence::harmonic(2), nullptr, 2);
        }) == "non-commuting");

  OperatorTuple big = make_tuple(1, 1, {(Eigen::MatrixXcd(1, 1) << 2.0).finished()});
  CHECK(kind_of([&] {
          (void)commutative_model(big, WeightSequence::harmonic(1), nullptr, 6);
        }) == "divergence-evidence");

  std::mt19937 qrng(7);
  OperatorTuple t = commuting_nilpotent_tuple(2, 3, qrng);
  const WeightSequence w = WeightSequence::harmonic(2);
  Eigen::MatrixXcd skew = (Eigen::MatrixXcd(3, 3) << 1, 1, 0, 0, 1, 0, 0, 0, 1).finished();
  CHECK(kind_of([&] { (void)commutative_model(t, w, &skew, 2); }) == "bad-q");
  Eigen::MatrixXcd neg = -Eigen::MatrixXcd::Identity(3, 3);
  CHECK(kind_of([&] { (void)commutative_model(t, w, &neg, 2); }) == "not-positive-definite");
  CHECK(kind_of([&] {
          (void)commutative_model(t, WeightSequence::harmonic(3), nullptr, 2);
        }) == "alphabet-mismatch");
}

TEST_CASE("multi-index calculus: pointwise on diagonals, tapered under fejer") {
  std::mt19937 rng(608);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::vector<std::vector<Complex>> diags(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) diags[static_cast<std::size_t>(i)].emplace_back(u(rng), u(rng));
  const OperatorTuple t = diagonal_tuple(2, diags);

  std::unordered_map<MultiIndex, Complex, WordHash> coeffs;
  for (int k1 = 0; k1 <= 2; ++k1)
    for (int k2 = 0; k1 + k2 <= 3; ++k2) coeffs[{k1, k2}] = Complex(u(rng), u(rng));

  const Eigen::MatrixXcd exact = commutative_calculus(coeffs, t, 3, CesaroMode::exact_poly);
  const int N = 5;
  const Eigen::MatrixXcd tapered = commutative_calculus(coeffs, t, N, CesaroMode::fejer);
  for (int j = 0; j < 4; ++j) {
    Complex want(0.0, 0.0), want_tapered(0.0, 0.0);
    for (const auto& [k, c] : coeffs) {
      Complex p = c;
      for (int a = 0; a < k[0]; ++a) p *= diags[0][static_cast<std::size_t>(j)];
      for (int a = 0; a < k[1]; ++a) p *= diags[1][static_cast<std::size_t>(j)];
      want += p;
      want_tapered += (1.0 - total_degree(k) / (N + 1.0)) * p;
    }
    CHECK(std::abs(exact(j, j) - want) <= 1e-10);
    CHECK(std::abs(tapered(j, j) - want_tapered) <= 1e-12);
  }

  const OperatorTuple nil = commuting_nilpotent_tuple(2, 4, rng);
  const Eigen::MatrixXcd poly = commutative_calculus(coeffs, nil, 3, CesaroMode::exact_poly);
  const Eigen::MatrixXcd series = commutative_calculus(coeffs, nil, 3, CesaroMode::hol0_series);
  CHECK((poly - series).cwiseAbs().maxCoeff() <= 1e-12);

  OperatorTuple big = make_tuple(1, 1, {(Eigen::MatrixXcd(1, 1) << 2.0).finished()});
  std::unordered_map<MultiIndex, Complex, WordHash> flat_tail;
  for (int k = 0; k <= 6; ++k) flat_tail[{k}] = Complex(1.0, 0.0);
  CHECK(kind_of([&] {
          (void)commutative_calculus(flat_tail, big, 6, CesaroMode::hol0_series);
        }) == "non-decaying-levels");

  std::unordered_map<MultiIndex, Complex, WordHash> wrong{{MultiIndex{1}, Complex(1.0, 0.0)}};
  CHECK(kind_of([&] { (void)commutative_calculus(wrong, t, 3, CesaroMode::exact_poly); }) ==
        "bad-multiindex");
}
