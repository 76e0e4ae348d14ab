#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"
#include "fockshift/model.hpp"

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

Eigen::MatrixXcd random_matrix(int d, std::mt19937& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = scale * std::complex<double>(g(rng), g(rng));
  return m;
}

OperatorTuple random_tuple(int n, int d, std::mt19937& rng, double scale = 0.7) {
  std::vector<Eigen::MatrixXcd> mats;
  for (int i = 0; i < n; ++i) mats.push_back(random_matrix(d, rng, scale));
  return make_tuple(n, d, std::move(mats));
}

// Strictly upper triangular entries only: products of d factors vanish.
OperatorTuple random_nilpotent_tuple(int n, int d, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::MatrixXcd> mats;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = r + 1; c < d; ++c) m(r, c) = std::complex<double>(g(rng), g(rng));
    mats.push_back(std::move(m));
  }
  return make_tuple(n, d, std::move(mats));
}

}  // namespace

TEST_CASE("tuple validation and commutation test") {
  Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2), e21 = Eigen::MatrixXcd::Zero(2, 2);
  e12(0, 1) = 1.0;
  e21(1, 0) = 1.0;

  CHECK(kind_of([&] { make_tuple(0, 2, {}); }) == "bad-alphabet");
  CHECK(kind_of([&] { make_tuple(2, 2, {e12}); }) == "shape-mismatch");
  CHECK(kind_of([&] { make_tuple(1, 3, {e12}); }) == "shape-mismatch");

  const OperatorTuple nc = make_tuple(2, 2, {e12, e21});
  CHECK(!is_commuting(nc));
  const OperatorTuple diag = make_tuple(
      2, 2, {Eigen::Vector2cd(0.3, 0.7).asDiagonal(), Eigen::Vector2cd(0.1, 0.2).asDiagonal()});
  CHECK(is_commuting(diag));
}

TEST_CASE("level norms of a scalar pair are exact powers") {
  // d = 1: phi(x) = (|0.3|^2 + |0.4|^2) x = 0.25 x, and 0.25 is a power of two,
  // so the normalised iteration reproduces 0.25^k without rounding.
  Eigen::MatrixXcd a(1, 1), b(1, 1);
  a(0, 0) = 0.3;
  b(0, 0) = 0.4;
  const OperatorTuple t = make_tuple(2, 1, {a, b});

  const TupleStats st = tuple_stats(t, 6);
  CHECK(st.level_norms[0] == 1.0);
  for (int k = 1; k <= 6; ++k) CHECK(st.level_norms[static_cast<std::size_t>(k)] == std::pow(0.25, k));
  for (int k = 1; k <= 6; ++k) CHECK(rel_err(st.roots[static_cast<std::size_t>(k - 1)], 0.5) < 1e-14);
  CHECK(rel_err(st.r_estimate, 0.5) < 1e-14);
  CHECK(!st.nilpotent_index);
  CHECK(is_commuting(t, 0.0));  // scalars always commute

  CHECK(kind_of([&] { tuple_stats(t, 0); }) == "bad-length");
}

TEST_CASE("nilpotent pair is detected with its index") {
  Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2);
  e12(0, 1) = 1.0;
  const OperatorTuple t = make_tuple(2, 2, {e12, Eigen::MatrixXcd::Zero(2, 2)});

  const TupleStats st = tuple_stats(t, 4);
  CHECK(st.level_norms[0] == 1.0);
  CHECK(st.level_norms[1] == 1.0);  // ||E12 E12*|| = ||E11||
  CHECK(st.level_norms[2] == 0.0);
  CHECK(st.nilpotent_index == 2);
  CHECK(st.roots[1] == 0.0);
  CHECK(st.r_estimate == 0.0);
}

TEST_CASE("tuple-measured weights satisfy the chain identity bitwise") {
  std::mt19937 rng(2026);
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorTuple t = random_tuple(2, 3, rng);
    const TupleStats st = tuple_stats(t, 6);
    const WeightSequence w = from_tuple_norms(t, 6);
    CHECK(w.kind() == WeightKind::level_table);
    CHECK(w.norm_level(0) == 1.0);
    for (int k = 1; k <= 6; ++k) {
      const double want = (static_cast<double>(k) + 1.0) *
                          std::sqrt(st.level_norms[static_cast<std::size_t>(k)]);
      CHECK(w.norm_level(k) == want);  // same scan, same doubles
      CHECK(w.a_data()[static_cast<std::size_t>(k)] == st.level_norms[static_cast<std::size_t>(k)]);
    }
  }
}

TEST_CASE("scalar embedding: K*K is the partial inverse-square sum") {
  Eigen::MatrixXcd a(1, 1), b(1, 1);
  a(0, 0) = 0.3;
  b(0, 0) = 0.4;
  const OperatorTuple t = make_tuple(2, 1, {a, b});
  const WeightSequence w = from_tuple_norms(t, 3);
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(1, 1);
  const ModelCertificate cert = build_K_embedding(t, w, q, 3);

  // sum_{|g|=k} |T_g|^2 = 0.25^k cancels the normalisation level by level.
  const double want = 1.0 + 1.0 / 4.0 + 1.0 / 9.0 + 1.0 / 16.0;
  CHECK(rel_err(cert.lambda_max, want) < 1e-12);
  CHECK(rel_err(cert.lambda_min, want) < 1e-12);
  CHECK(rel_err(cert.cb_bound, 1.0) < 1e-12);
  for (int k = 0; k <= 3; ++k)
    CHECK(cert.level_term_norms[static_cast<std::size_t>(k)] ==
          1.0 / ((static_cast<double>(k) + 1.0) * (static_cast<double>(k) + 1.0)));
  // Residual is the dropped top block: |T_i| / (N + 1) for the scalar pair.
  CHECK(rel_err(cert.residuals[0], 0.3 / 4.0) < 1e-12);
  CHECK(rel_err(cert.residuals[1], 0.4 / 4.0) < 1e-12);
}

TEST_CASE("nilpotent embedding: exact residual zero and finite bound") {
  Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2);
  e12(0, 1) = 1.0;
  const OperatorTuple t = make_tuple(2, 2, {e12, Eigen::MatrixXcd::Zero(2, 2)});
  const WeightSequence w = from_tuple_norms(t, 2);
  CHECK(w.zero_beyond_cap());
  CHECK(w.norm_level(1) == 2.0);
  CHECK(w.norm_level(4) == 0.0);

  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(2, 2);
  const ModelCertificate cert = build_K_embedding(t, w, q, 2);
  CHECK(cert.residuals[0] == 0.0);  // products of length >= 2 vanish structurally
  CHECK(cert.residuals[1] == 0.0);
  CHECK(cert.lambda_min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.lambda_max == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(cert.convergence == "finite");

  const double bound = model_bound(t, ModelMode::nilpotent, 6);
  CHECK(bound == std::sqrt(1.25));
  CHECK(bound == doctest::Approx(1.118033988749895).epsilon(1e-15));
  CHECK(kind_of([&] { model_bound(t, ModelMode::main1, 6); }) == "mode-mismatch");
}

TEST_CASE("measured weights make every level term an exact inverse square") {
  std::mt19937 rng(77);
  const Eigen::MatrixXcd q3 = Eigen::MatrixXcd::Identity(3, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorTuple t = random_tuple(2, 3, rng, 0.9);
    const WeightSequence w = from_tuple_norms(t, 6);
    const ModelCertificate cert = build_K_embedding(t, w, q3, 6);
    double partial = 0.0;
    for (int k = 0; k <= 6; ++k) {
      const double kd = static_cast<double>(k);
      CHECK(cert.level_term_norms[static_cast<std::size_t>(k)] == 1.0 / ((kd + 1.0) * (kd + 1.0)));
      partial += cert.level_term_norms[static_cast<std::size_t>(k)];
      CHECK(partial <= std::numbers::pi * std::numbers::pi / 6.0 + 1e-9);
    }
    CHECK(cert.lambda_min >= 1.0 - 1e-12);
    CHECK(cert.cb_bound <= std::numbers::pi / std::sqrt(6.0) + 1e-9);
    CHECK(cert.convergence == "convergent-evidence");
    CHECK(model_bound(t, ModelMode::main1, 6) == std::numbers::pi / std::sqrt(6.0));
  }
}

TEST_CASE("embedding rejects bad Q and diverging tuples") {
  Eigen::MatrixXcd a(1, 1);
  a(0, 0) = 2.0;  // ||phi^k(I)|| = 4^k grows against unit weights
  const OperatorTuple t = make_tuple(1, 1, {a});
  const Eigen::MatrixXcd q1 = Eigen::MatrixXcd::Identity(1, 1);
  CHECK(kind_of([&] { build_K_embedding(t, WeightSequence::unit(1), q1, 6); }) ==
        "divergence-evidence");

  Eigen::MatrixXcd bad(1, 1);
  bad(0, 0) = std::complex<double>(1.0, 1.0);  // not Hermitian
  CHECK(kind_of([&] { build_K_embedding(t, WeightSequence::unit(1), bad, 3); }) == "bad-q");
  Eigen::MatrixXcd sing = Eigen::MatrixXcd::Zero(1, 1);
  CHECK(kind_of([&] { build_K_embedding(t, WeightSequence::unit(1), sing, 3); }) ==
        "not-positive-definite");
  CHECK(kind_of([&] { build_K_embedding(t, WeightSequence::unit(2), q1, 3); }) ==
        "alphabet-mismatch");
}

TEST_CASE("rota mode measures the conditioning of the chosen Q") {
  Eigen::MatrixXcd a(1, 1), b(1, 1);
  a(0, 0) = 0.3;
  b(0, 0) = 0.4;
  const OperatorTuple t = make_tuple(2, 1, {a, b});
  Eigen::MatrixXcd q(1, 1);
  q(0, 0) = 2.0;
  // Scalar case: K*K is a single number, so the conditioning collapses to 1.
  CHECK(rel_err(model_bound(t, ModelMode::rota, 4, &q), 1.0) < 1e-12);
  CHECK(kind_of([&] { model_bound(t, ModelMode::rota, 4); }) == "mode-mismatch");
  CHECK(kind_of([&] { model_bound(t, ModelMode::nilpotent, 4); }) == "mode-mismatch");

  std::mt19937 rng(11);
  const OperatorTuple r = random_tuple(2, 3, rng);
  Eigen::MatrixXcd qr = random_matrix(3, rng, 1.0);
  qr = Eigen::MatrixXcd(qr * qr.adjoint()) + Eigen::MatrixXcd::Identity(3, 3);
  const double cb = model_bound(r, ModelMode::rota, 5, &qr);
  CHECK(cb >= 1.0);
  CHECK(std::isfinite(cb));
}

TEST_CASE("dyadic comparison weights from a factorial-decay sequence") {
  std::vector<double> a{1.0};
  for (int k = 1; k <= 8; ++k) a.push_back(a.back() / static_cast<double>(k));
  const FpWeights fp = foias_pearcy_weights(2, a);

  CHECK(fp.kappa[0] == 1.0);  // kappa(1) = a_1
  CHECK(fp.kappa[1] == std::pow(0.5, 0.25));
  CHECK(fp.kappa[1] == doctest::Approx(0.8408964152537145).epsilon(1e-15));
  for (std::size_t k = 1; k < fp.kappa.size(); ++k) CHECK(fp.kappa[k] <= fp.kappa[k - 1]);
  for (int k = 1; k <= 8; ++k) {
    const double root = std::pow(a[static_cast<std::size_t>(k)], 1.0 / static_cast<double>(k));
    CHECK(fp.kappa[static_cast<std::size_t>(k - 1)] >= root * (1.0 - 1e-12));
    CHECK(fp.sigma[static_cast<std::size_t>(k)] > 0.0);
    CHECK(fp.sigma[static_cast<std::size_t>(k)] <= 1.0);
  }
  CHECK(fp.sigma[0] == 1.0);
  CHECK(fp.quasi_nilpotent_evidence);

  const FpCertificate c = foias_pearcy_certify(fp, 8);
  CHECK(c.y_norm == 1.0);
  CHECK(c.min_sigma > 0.0);
  CHECK(c.max_residual <= 1e-12);
  CHECK(c.kappa_nonincreasing);
  CHECK(c.kappa_dominates_roots);
}

TEST_CASE("geometric sequences collapse the comparison to a constant") {
  std::vector<double> a{1.0};
  for (int k = 1; k <= 8; ++k) a.push_back(a.back() * 0.5);
  const FpWeights fp = foias_pearcy_weights(2, a);
  for (double k : fp.kappa) CHECK(k == doctest::Approx(0.5).epsilon(1e-14));
  for (double s : fp.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!fp.quasi_nilpotent_evidence);  // roots sit at 0.5, no decay

  std::vector<double> flat(9, 1.0);
  const FpWeights one = foias_pearcy_weights(2, flat);
  CHECK(!one.quasi_nilpotent_evidence);
  for (double k : one.kappa) CHECK(k == 1.0);
  for (double s : one.sigma) CHECK(s == 1.0);
}

TEST_CASE("comparison weights reject nilpotent or inflating sequences") {
  CHECK(kind_of([] { foias_pearcy_weights(2, {1.0, 0.5, 0.0}); }) == "nilpotent-input");
  CHECK(kind_of([] { foias_pearcy_weights(2, {1.0, 2.0, 5.0}); }) == "not-submultiplicative");
  CHECK(kind_of([] { foias_pearcy_weights(2, {0.5, 1.0}); }) == "bad-sequence");
  CHECK(kind_of([] { foias_pearcy_weights(2, {1.0}); }) == "bad-sequence");
}

TEST_CASE("intertwiner certificate against materialised shifts") {
  std::vector<double> a{1.0};
  for (int k = 1; k <= 6; ++k) a.push_back(a.back() / std::sqrt(static_cast<double>(k)));
  const FpWeights fp = foias_pearcy_weights(2, a);
  const FpCertificate c = foias_pearcy_certify(fp, 6);

  // Rebuild the residual from actual shift matrices: Y V_i* - W_i* Y.
  const WordTable table = WordTable::build(2, 6);
  const WeightSequence wk = WeightSequence::from_levels(2, fp.kappa, false);
  Eigen::VectorXd y(static_cast<Eigen::Index>(table.words.size()));
  for (std::size_t i = 0; i < table.words.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = fp.sigma[static_cast<std::size_t>(table.level_of(static_cast<int>(i)))];
  double worst = 0.0;
  for (int gen = 1; gen <= 2; ++gen) {
    const Eigen::MatrixXd v = Eigen::MatrixXd(shift_matrix(table, fp.mu, gen, Side::left, true));
    const Eigen::MatrixXd w = Eigen::MatrixXd(shift_matrix(table, wk, gen, Side::left, true));
    const Eigen::MatrixXd r = y.asDiagonal() * v - w * y.asDiagonal();
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
  CHECK(c.max_residual <= 1e-12);
  CHECK(std::abs(worst - c.max_residual) <= 1e-15);
}

TEST_CASE("tuple-measured comparison weights and the embedding battery") {
  // Small scale keeps ||phi^k(I)|| decaying, the regime where the fourth-root
  // weights give a convergent embedding; growing tuples are rejected upstream.
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 3; ++trial) {
    const OperatorTuple t = random_tuple(2, 3, rng, 0.1);
    const FpWeights fp = foias_pearcy_weights(t, 6);
    for (std::size_t k = 1; k < fp.a.size(); ++k) CHECK(fp.a[k] > 0.0);
    const FpCertificate c = foias_pearcy_certify(fp, 6, &t);
    CHECK(c.y_norm == 1.0);
    CHECK(c.min_sigma > 0.0);
    CHECK(c.max_residual <= 1e-12);
    CHECK(c.kappa_nonincreasing);
    CHECK(c.kappa_dominates_roots);
    CHECK(c.battery_min_ratio >= 1.0 - 1e-12);
    CHECK(c.battery_pairing_err <= 1e-10);
  }

  Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2);
  e12(0, 1) = 1.0;
  const OperatorTuple nil = make_tuple(2, 2, {e12, Eigen::MatrixXcd::Zero(2, 2)});
  CHECK(kind_of([&] { foias_pearcy_weights(nil, 5); }) == "nilpotent-input");
}

TEST_CASE("random nilpotent tuples meet the finite-sum bound") {
  std::mt19937 rng(9001);
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorTuple t = random_nilpotent_tuple(2, 4, rng);
    const TupleStats st = tuple_stats(t, 6);
    REQUIRE(st.nilpotent_index.has_value());
    const int m = *st.nilpotent_index;
    REQUIRE(m <= 4);
    double sum = 0.0;
    for (int k = 0; k < m; ++k)
      sum += 1.0 / ((static_cast<double>(k) + 1.0) * (static_cast<double>(k) + 1.0));
    CHECK(model_bound(t, ModelMode::nilpotent, 6) == std::sqrt(sum));

    const WeightSequence w = from_tuple_norms(t, m);
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(4, 4);
    const ModelCertificate cert = build_K_embedding(t, w, q, std::max(1, m - 1));
    for (double r : cert.residuals) CHECK(r <= 1e-11);
    CHECK(cert.cb_bound <= std::sqrt(sum) + 1e-12);
  }
}
