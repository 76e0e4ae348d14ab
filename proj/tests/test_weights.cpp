#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "fockshift/errors.hpp"
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
  const double scale = std::max({std::abs(got), std::abs(want), 1.0});
  return std::abs(got - want) / scale;
}

}  // namespace

TEST_CASE("closed-form level weights") {
  const auto besov2 = WeightSequence::besov(2, 2.0);
  CHECK(rel_err(besov2.mu_level(1), std::sqrt(1.0 / 2.0)) < 1e-15);
  CHECK(rel_err(besov2.mu_level(2), std::sqrt(2.0 / 3.0)) < 1e-15);
  // squared chain to g0 at level 2: 1/binom(3,2) = 1/3
  const double chain2 = besov2.norm_level(2);
  CHECK(rel_err(chain2 * chain2, 1.0 / 3.0) < 1e-15);
  CHECK(rel_err(besov2.b_level(2), 3.0) < 1e-15);

  const auto diri = WeightSequence::dirichlet_scale(2, 1.0);
  CHECK(rel_err(diri.mu_level(3), std::sqrt(3.0 / 4.0)) < 1e-15);
  CHECK(rel_err(diri.norm_level(3), 0.5) < 1e-15);
  CHECK(rel_err(diri.b_level(3), 4.0) < 1e-15);

  const auto harm = WeightSequence::harmonic(2);
  CHECK(harm.mu_level(3) == 4.0 / 3.0);
  CHECK(harm.norm_level(3) == 4.0);
  CHECK(rel_err(harm.b_level(3), 1.0 / 16.0) < 1e-15);

  const auto hsq = WeightSequence::harmonic_squared(2);
  CHECK(hsq.norm_level(2) == 9.0);

  const auto inv = WeightSequence::inverse_square(2);
  CHECK(inv.mu_level(2) == 1.0 / 9.0);

  const auto cst = WeightSequence::constant(3, 0.5);
  CHECK(cst.norm_level(4) == 0.0625);
  CHECK(cst.b_level(4) == 256.0);

  CHECK(WeightSequence::unit(2).mu(Word{1, 2, 1}) == 1.0);
  CHECK(kind_of([] { WeightSequence::besov(2, 0.0); }) == "bad-family-param");
  CHECK(kind_of([] { WeightSequence::constant(2, -1.0); }) == "bad-family-param");
}

TEST_CASE("b round trip: b_level is the inverse squared chain") {
  for (const auto& w : {WeightSequence::besov(2, 1.5), WeightSequence::dirichlet_scale(2, -0.5),
                        WeightSequence::harmonic(2), WeightSequence::inverse_square(2)}) {
    for (int k = 0; k <= 8; ++k) {
      const double nl = w.norm_level(k);
      CHECK(rel_err(w.b_level(k) * nl * nl, 1.0) < 1e-13);
    }
  }
}

TEST_CASE("cocycle identity for chains") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> letter(1, 2), len(0, 3);
  const auto families = {WeightSequence::besov(2, 2.5), WeightSequence::harmonic(2),
                         WeightSequence::dirichlet_scale(2, 1.0)};
  auto rand_word = [&](int l) {
    Word w;
    for (int i = 0; i < l; ++i) w.push_back(letter(rng));
    return w;
  };
  for (const auto& w : families) {
    for (int trial = 0; trial < 50; ++trial) {
      const Word beta = rand_word(len(rng)), gamma = rand_word(len(rng)), alpha = rand_word(len(rng));
      Word bg = beta;
      bg.insert(bg.end(), gamma.begin(), gamma.end());
      Word ga = gamma;
      ga.insert(ga.end(), alpha.begin(), alpha.end());
      // mu(beta gamma, alpha) = mu(beta, gamma alpha) mu(gamma, alpha)
      const double lhs = mu_chain(w, bg, alpha);
      const double rhs = mu_chain(w, beta, ga) * mu_chain(w, gamma, alpha);
      CHECK(rel_err(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("harmonic chains decrease in the anchor length") {
  const auto w = WeightSequence::harmonic(2);
  // mu(beta, alpha) = (|alpha| + k + 1)/(|alpha| + 1), largest at alpha = g0
  for (int k = 1; k <= 4; ++k) {
    CHECK(mu_chain_level(w, k, 0) == static_cast<double>(k + 1));
    for (int m = 1; m <= 5; ++m) {
      const double expect = static_cast<double>(m + k + 1) / static_cast<double>(m + 1);
      CHECK(mu_chain_level(w, k, m) == expect);
      CHECK(mu_chain_level(w, k, m) < mu_chain_level(w, k, m - 1));
    }
  }
}

TEST_CASE("interpolation reproduces the sequence exactly") {
  const std::vector<double> a{1.0, 0.5, 0.2, 0.07};
  const auto w = interpolate_from_sequence(a, 2);
  CHECK(w.norm_level(0) == 1.0);
  for (std::size_t k = 1; k <= a.size(); ++k)
    CHECK(w.norm_level(static_cast<int>(k)) == a[k - 1]);  // bitwise, not approximate
  CHECK(w.mu_level(2) == 0.5 / 1.0 * (0.5 / 0.5));  // a_2/a_1 literally
}

TEST_CASE("interpolation rejects non-submultiplicative sequences") {
  // a_2 = 2 > a_1 * a_1
  CHECK(kind_of([] { interpolate_from_sequence({1.0, 2.0}, 2); }) == "not-submultiplicative");
  // geometric boundary case is accepted
  const auto w = interpolate_from_sequence({2.0, 4.0, 8.0}, 2);
  CHECK(w.mu_level(1) == 2.0);
  CHECK(w.mu_level(3) == 2.0);
  // zeros must be terminal
  CHECK(kind_of([] { interpolate_from_sequence({1.0, 0.0, 1.0}, 2); }) == "bad-zero-pattern");
  // nilpotent sequence: zero tail extends past the data
  const auto nil = interpolate_from_sequence({1.0, 1.0, 0.0}, 2);
  CHECK(nil.zero_beyond_cap());
  CHECK(nil.mu_level(3) == 0.0);
  CHECK(nil.norm_level(9) == 0.0);
}

TEST_CASE("tabulated word weights") {
  std::unordered_map<Word, double, WordHash> table;
  table[Word{1}] = 1.0;
  table[Word{2}] = 0.5;
  table[Word{1, 2}] = 2.0;  // mu_{g1 g2}
  const auto w = WeightSequence::tabulated(2, table);
  CHECK_FALSE(w.length_only());
  CHECK(w.mu(unit_word()) == 1.0);
  CHECK(w.mu(Word{1, 2}) == 2.0);
  CHECK(w.mu(Word{2, 1}) == 0.0);  // missing = exact zero
  CHECK(mu_norm(w, Word{1, 2}) == 2.0 * 0.5);
  CHECK(kind_of([&] { w.mu(Word{1, 2, 1}); }) == "cap-exceeded");
  CHECK(kind_of([&] { b_weight(w, Word{2, 1}); }) == "zero-weight");
  CHECK(rel_err(b_weight(w, Word{1, 2}), 1.0) < 1e-15);  // chain is 2 * 0.5 = 1

  // nonzero support must be suffix-closed: mu_{g1 g2} != 0 needs mu_{g2} != 0
  std::unordered_map<Word, double, WordHash> bad;
  bad[Word{1}] = 1.0;
  bad[Word{1, 2}] = 2.0;
  CHECK(kind_of([&] { WeightSequence::tabulated(2, bad); }) == "bad-truncation");
  const auto loose = WeightSequence::tabulated(2, bad, /*allow_any_pattern=*/true);
  CHECK(loose.mu(Word{1, 2}) == 2.0);
}

TEST_CASE("right-shift weights") {
  const auto w = WeightSequence::besov(2, 2.0);
  // length-only: right weight equals the left level weight
  CHECK(mu_right(w, Word{1, 2}, 1) == w.mu_level(3));

  std::unordered_map<Word, double, WordHash> table;
  table[Word{1}] = 0.5;
  table[Word{2}] = 1.0;
  table[Word{1, 1}] = 0.25;
  table[Word{2, 1}] = 4.0;
  const auto t = WeightSequence::tabulated(2, table);
  // alpha = g1 extended by g1: chain(g1 g1)/chain(g1) = (0.25 * 0.5)/0.5
  CHECK(rel_err(mu_right(t, Word{1}, 1), 0.25) < 1e-15);
  // alpha = g2 extended by g1 on the right is the word g2 g1
  CHECK(rel_err(mu_right(t, Word{2}, 1), mu_norm(t, Word{2, 1}) / mu_norm(t, Word{2})) < 1e-15);
}

TEST_CASE("series weights recover the binomial family") {
  // phi = Z_1 + Z_2 with s: b at level k is binom(s+k-1, k), so mu matches
  // the closed-form family on every word of the same length.
  std::unordered_map<Word, double, WordHash> phi;
  phi[Word{1}] = 1.0;
  phi[Word{2}] = 1.0;
  const double s = 2.0;
  const auto w = WeightSequence::series(2, phi, s, 4);
  const auto ref = WeightSequence::besov(2, s);
  for (const Word& word : enumerate_words(2, 4)) {
    if (word.empty()) continue;
    CHECK(rel_err(w.mu(word), ref.mu_level(static_cast<int>(word.size()))) < 1e-12);
  }
  CHECK(kind_of([&] { WeightSequence::series(2, phi, 0.5, 3); }) == "bad-family-param");
  std::unordered_map<Word, double, WordHash> partial;
  partial[Word{1}] = 1.0;  // generator 2 missing: b would vanish on g2-words
  CHECK(kind_of([&] { WeightSequence::series(2, partial, 2.0, 3); }) == "bad-series");
}

TEST_CASE("class sums of b-weights") {
  const auto w = WeightSequence::besov(2, 2.0);
  // length-only: omega_k = multinomial(k) * b_{|k|}
  CHECK(rel_err(class_sum_b(w, MultiIndex{1, 1}), 2.0 * w.b_level(2)) < 1e-14);
  CHECK(rel_err(class_sum_b(w, MultiIndex{2, 1}), 3.0 * w.b_level(3)) < 1e-14);
  CHECK(class_sum_b(WeightSequence::unit(3), MultiIndex{1, 1, 0}) == 2.0);
  CHECK(class_sum_b(WeightSequence::unit(2), MultiIndex{0, 0}) == 1.0);
}

TEST_CASE("boundedness scan verdicts") {
  const auto rep = boundedness_report(WeightSequence::harmonic(2), 6);
  REQUIRE(rep.generators.size() == 2);
  for (const auto& g : rep.generators) {
    CHECK(g.verdict == "certified");
    REQUIRE(g.certified_sup.has_value());
    CHECK(*g.certified_sup == 2.0);  // sup (k+1)/k = 2 at k = 1
    CHECK(g.left_sup == 2.0);
    CHECK(g.right_sup <= 2.0);
  }

  // growing weights get flagged when the scan does not reach the cap
  const std::vector<double> doubling{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
  const auto grow = boundedness_report(WeightSequence::from_levels(2, doubling, false), 5);
  CHECK(grow.generators[0].verdict == "unbounded-suspected");
  CHECK_FALSE(grow.generators[0].certified_sup.has_value());

  // a whole-domain scan of a capped table pins the sup exactly
  const auto covered = boundedness_report(WeightSequence::from_levels(2, doubling, false), 8);
  CHECK(covered.generators[0].verdict == "certified");
  CHECK(*covered.generators[0].certified_sup == 128.0);
}

TEST_CASE("level table caps") {
  const auto w = WeightSequence::from_levels(2, {1.0, 0.5}, false);
  CHECK(w.mu_level(2) == 0.5);
  CHECK(kind_of([&] { w.mu_level(3); }) == "cap-exceeded");
  CHECK(kind_of([&] { w.mu(Word{1, 1, 1}); }) == "cap-exceeded");
  CHECK(kind_of([] { WeightSequence::from_levels(2, {1.0, -0.5}, false); }) == "bad-weight");
}
