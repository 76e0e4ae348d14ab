#include "fockshift/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fockshift/errors.hpp"
#include "fockshift/limits.hpp"

namespace fockshift {

const Limits& default_limits() {
  static const Limits lim = [] {
    Limits l;
    if (const char* env = std::getenv("FOCKSHIFT_MAX_DIM")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) l.max_dim = static_cast<std::size_t>(v);
    }
    return l;
  }();
  return lim;
}

void check_alphabet_cap(int n, const Limits& lim) {
  require(n >= 1 && n <= lim.max_n, "resource-cap",
          "n = " + std::to_string(n) + " outside 1.." + std::to_string(lim.max_n));
}

void check_space_cap(int n, int N, const Limits& lim) {
  check_alphabet_cap(n, lim);
  require(N >= 0 && N <= lim.max_N, "resource-cap",
          "level cap N = " + std::to_string(N) + " outside 0.." + std::to_string(lim.max_N));
  const std::size_t dim = graded_dim(n, N);
  require(dim <= lim.max_dim, "resource-cap",
          "dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(lim.max_dim));
}

namespace {

// Generalized binomial C(s+k-1, k) as an incremental product; exact for the
// small integer parameters used in tests.
double rising_binom(double s, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= (s - 1.0 + static_cast<double>(j)) / static_cast<double>(j);
  return r;
}

Word drop_first(const Word& w) { return Word(w.begin() + 1, w.end()); }

// Noncommutative polynomial product truncated at total degree cap.
using Poly = std::unordered_map<Word, double, WordHash>;

Poly poly_mul(const Poly& p, const Poly& q, int cap) {
  Poly out;
  for (const auto& [u, a] : p)
    for (const auto& [v, b] : q) {
      if (static_cast<int>(u.size() + v.size()) > cap) continue;
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      out[uv] += a * b;
    }
  return out;
}

}  // namespace

const char* kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::unit: return "unit";
    case WeightKind::besov: return "besov";
    case WeightKind::dirichlet: return "dirichlet";
    case WeightKind::harmonic: return "harmonic";
    case WeightKind::harmonic_sq: return "harmonic_sq";
    case WeightKind::inverse_square: return "inverse_square";
    case WeightKind::constant: return "constant";
    case WeightKind::interpolated: return "interpolated";
    case WeightKind::level_table: return "level_table";
    case WeightKind::series: return "series";
    case WeightKind::tabulated: return "tabulated";
    case WeightKind::indexed: return "indexed";
  }
  return "?";
}

WeightSequence::WeightSequence(int n, WeightKind kind) : n_(n), kind_(kind) {
  require(n >= 1, "bad-alphabet", "number of generators must be >= 1");
}

WeightSequence WeightSequence::unit(int n) { return WeightSequence(n, WeightKind::unit); }

WeightSequence WeightSequence::besov(int n, double s) {
  require(s > 0.0, "bad-family-param", "besov family needs s > 0");
  WeightSequence w(n, WeightKind::besov);
  w.s_ = s;
  return w;
}

WeightSequence WeightSequence::dirichlet_scale(int n, double s) {
  WeightSequence w(n, WeightKind::dirichlet);
  w.s_ = s;
  return w;
}

WeightSequence WeightSequence::harmonic(int n) { return WeightSequence(n, WeightKind::harmonic); }

WeightSequence WeightSequence::harmonic_squared(int n) {
  return WeightSequence(n, WeightKind::harmonic_sq);
}

WeightSequence WeightSequence::inverse_square(int n) {
  return WeightSequence(n, WeightKind::inverse_square);
}

WeightSequence WeightSequence::constant(int n, double rho) {
  require(rho >= 0.0, "bad-family-param", "constant family needs rho >= 0");
  WeightSequence w(n, WeightKind::constant);
  w.s_ = rho;
  return w;
}

WeightSequence WeightSequence::tabulated(int n, std::unordered_map<Word, double, WordHash> table,
                                         bool allow_any_pattern, int cap) {
  WeightSequence w(n, WeightKind::tabulated);
  int max_len = 0;
  for (const auto& [word, value] : table) {
    require(!word.empty(), "bad-word", "tabulated weights index words of length >= 1");
    for (int c : word)
      require(c >= 1 && c <= n, "bad-word", "table word letter outside 1..n");
    require(value >= 0.0, "bad-weight", "weights must be >= 0");
    max_len = std::max(max_len, static_cast<int>(word.size()));
  }
  w.cap_ = std::max(max_len, cap);
  require(w.cap_ >= 1, "bad-weight", "empty weight table");
  w.table_ = std::move(table);
  if (!allow_any_pattern) {
    // Truncation validity: nonzero support is suffix-closed (a word with a
    // zero-weight proper suffix cannot carry weight).
    for (const auto& [word, value] : w.table_) {
      if (value == 0.0 || word.size() < 2) continue;
      const auto it = w.table_.find(drop_first(word));
      require(it != w.table_.end() && it->second != 0.0, "bad-truncation",
              "nonzero weight at \"" + word_to_string(word) + "\" above a zero-weight suffix");
    }
  }
  return w;
}

WeightSequence WeightSequence::from_levels(int n, std::vector<double> mu_levels, bool zero_beyond) {
  WeightSequence w(n, WeightKind::level_table);
  require(!mu_levels.empty(), "bad-weight", "empty level table");
  bool seen_zero = false;
  for (double v : mu_levels) {
    require(v >= 0.0, "bad-weight", "weights must be >= 0");
    require(!(seen_zero && v != 0.0), "bad-zero-pattern",
            "level weights must stay zero once they vanish");
    seen_zero = seen_zero || v == 0.0;
  }
  w.cap_ = static_cast<int>(mu_levels.size());
  w.zero_beyond_ = zero_beyond || seen_zero;
  w.norm_levels_.assign(static_cast<std::size_t>(w.cap_) + 1, 1.0);
  for (int k = 1; k <= w.cap_; ++k)
    w.norm_levels_[static_cast<std::size_t>(k)] =
        w.norm_levels_[static_cast<std::size_t>(k - 1)] * mu_levels[static_cast<std::size_t>(k - 1)];
  w.mu_levels_ = std::move(mu_levels);
  return w;
}

WeightSequence WeightSequence::from_chain_levels(int n, std::vector<double> norm_levels, bool zero_beyond,
                                                 std::vector<double> calibration) {
  WeightSequence w(n, WeightKind::level_table);
  require(!norm_levels.empty() && norm_levels[0] == 1.0, "bad-weight",
          "chain table must start with 1 at level zero");
  bool seen_zero = false;
  for (double v : norm_levels) {
    require(v >= 0.0, "bad-weight", "weights must be >= 0");
    require(!(seen_zero && v != 0.0), "bad-zero-pattern",
            "level weights must stay zero once they vanish");
    seen_zero = seen_zero || v == 0.0;
  }
  w.cap_ = static_cast<int>(norm_levels.size()) - 1;
  require(w.cap_ >= 1, "bad-length", "chain table needs at least one level beyond the unit");
  w.zero_beyond_ = zero_beyond || seen_zero;
  w.mu_levels_.assign(static_cast<std::size_t>(w.cap_), 0.0);
  for (int k = 1; k <= w.cap_; ++k) {
    const double prev = norm_levels[static_cast<std::size_t>(k - 1)];
    w.mu_levels_[static_cast<std::size_t>(k - 1)] =
        prev == 0.0 ? 0.0 : norm_levels[static_cast<std::size_t>(k)] / prev;
  }
  w.norm_levels_ = std::move(norm_levels);
  w.a_ = std::move(calibration);
  return w;
}

WeightSequence WeightSequence::from_index_values(int n, int cap_len, std::vector<double> values) {
  WeightSequence w(n, WeightKind::indexed);
  require(cap_len >= 1, "bad-length", "index table needs cap >= 1");
  require(values.size() == graded_dim(n, cap_len), "bad-weight",
          "index table size does not match the graded dimension");
  require(values[0] == 1.0, "bad-weight", "index table entry for the unit word must be 1");
  for (std::size_t i = 1; i < values.size(); ++i) {
    require(values[i] >= 0.0, "bad-weight", "weights must be >= 0");
    const Word word = word_at(i, n);
    if (values[i] != 0.0 && word.size() >= 2)
      require(values[graded_index(drop_first(word), n)] != 0.0, "bad-truncation",
              "nonzero weight at \"" + word_to_string(word) + "\" above a zero-weight suffix");
  }
  w.cap_ = cap_len;
  w.by_index_ = std::move(values);
  return w;
}

WeightSequence WeightSequence::series(int n, const std::unordered_map<Word, double, WordHash>& phi,
                                      double s, int cap_len) {
  require(s >= 1.0, "bad-family-param", "series construction needs s >= 1");
  require(cap_len >= 1, "bad-length", "series construction needs cap >= 1");
  check_space_cap(n, cap_len);
  std::vector<bool> letter_seen(static_cast<std::size_t>(n), false);
  for (const auto& [word, d] : phi) {
    require(!word.empty(), "bad-series", "series coefficients index words of length >= 1");
    for (int c : word)
      require(c >= 1 && c <= n, "bad-series", "series word letter outside 1..n");
    require(d >= 0.0, "bad-series", "series coefficients must be >= 0");
    if (word.size() == 1 && d > 0.0) letter_seen[static_cast<std::size_t>(word[0] - 1)] = true;
  }
  for (int i = 0; i < n; ++i)
    require(letter_seen[static_cast<std::size_t>(i)], "bad-series",
            "series needs d > 0 at every single-letter word (missing g_" + std::to_string(i + 1) + ")");

  // b = coefficients of 1 + sum_{k>=1} C(s+k-1,k) phi^k, truncated at cap_len;
  // phi has no constant term, so powers beyond cap_len cannot contribute.
  Poly b;
  Poly power;
  for (const auto& [word, d] : phi)
    if (static_cast<int>(word.size()) <= cap_len && d != 0.0) power[word] = d;
  for (int k = 1; k <= cap_len && !power.empty(); ++k) {
    const double coeff = rising_binom(s, k);
    for (const auto& [word, v] : power) b[word] += coeff * v;
    if (k < cap_len) power = poly_mul(power, phi, cap_len);
  }

  WeightSequence w(n, WeightKind::series);
  w.s_ = s;
  w.cap_ = cap_len;
  const auto b_of = [&](const Word& word) -> double {
    if (word.empty()) return 1.0;
    const auto it = b.find(word);
    return it == b.end() ? 0.0 : it->second;
  };
  for (const Word& word : enumerate_words(n, cap_len)) {
    if (word.empty()) continue;
    const double bw = b_of(word);
    require(bw > 0.0, "bad-series", "vanishing b-coefficient at \"" + word_to_string(word) + "\"");
    w.table_[word] = std::sqrt(b_of(drop_first(word)) / bw);
  }
  return w;
}

WeightSequence interpolate_from_sequence(const std::vector<double>& a, int n) {
  require(!a.empty(), "bad-sequence", "empty norm sequence");
  std::vector<double> full(a.size() + 1);
  full[0] = 1.0;
  std::copy(a.begin(), a.end(), full.begin() + 1);
  const int p = static_cast<int>(full.size()) - 1;
  bool seen_zero = false;
  for (int k = 0; k <= p; ++k) {
    require(full[static_cast<std::size_t>(k)] >= 0.0, "bad-sequence", "norm sequence must be >= 0");
    if (full[static_cast<std::size_t>(k)] == 0.0) seen_zero = true;
    else
      require(!seen_zero, "bad-zero-pattern",
              "norm sequence must stay zero once it vanishes (a_" + std::to_string(k) + " > 0)");
  }
  for (int k = 1; k <= p; ++k)
    for (int m = 1; k + m <= p; ++m)
      require(full[static_cast<std::size_t>(k + m)] <=
                  full[static_cast<std::size_t>(k)] * full[static_cast<std::size_t>(m)],
              "not-submultiplicative",
              "a_" + std::to_string(k + m) + " > a_" + std::to_string(k) + " * a_" +
                  std::to_string(m));

  WeightSequence w(n, WeightKind::interpolated);
  w.cap_ = p;
  w.zero_beyond_ = seen_zero;
  w.a_ = full;
  w.norm_levels_ = full;
  w.mu_levels_.resize(static_cast<std::size_t>(p));
  for (int k = 1; k <= p; ++k) {
    const double prev = full[static_cast<std::size_t>(k - 1)];
    w.mu_levels_[static_cast<std::size_t>(k - 1)] =
        prev > 0.0 ? full[static_cast<std::size_t>(k)] / prev : 0.0;
  }
  return w;
}

bool WeightSequence::length_only() const {
  switch (kind_) {
    case WeightKind::series:
    case WeightKind::tabulated:
    case WeightKind::indexed: return false;
    default: return true;
  }
}

double WeightSequence::mu_level(int k) const {
  require(k >= 1, "bad-length", "mu_level needs k >= 1");
  const double kd = static_cast<double>(k);
  switch (kind_) {
    case WeightKind::unit: return 1.0;
    case WeightKind::besov: return std::sqrt(kd / (s_ + kd - 1.0));
    case WeightKind::dirichlet: return std::pow(kd / (kd + 1.0), s_ / 2.0);
    case WeightKind::harmonic: return (kd + 1.0) / kd;
    case WeightKind::harmonic_sq: {
      const double r = (kd + 1.0) / kd;
      return r * r;
    }
    case WeightKind::inverse_square: return 1.0 / ((kd + 1.0) * (kd + 1.0));
    case WeightKind::constant: return s_;
    case WeightKind::interpolated:
    case WeightKind::level_table:
      if (k > cap_) {
        if (zero_beyond_) return 0.0;
        fail("cap-exceeded", "level " + std::to_string(k) + " beyond the weight table cap " +
                                 std::to_string(cap_));
      }
      return mu_levels_[static_cast<std::size_t>(k - 1)];
    default: fail("bad-weight-kind", "mu_level on word-indexed weights");
  }
}

double WeightSequence::norm_level(int k) const {
  require(k >= 0, "bad-length", "norm_level needs k >= 0");
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  switch (kind_) {
    case WeightKind::unit: return 1.0;
    case WeightKind::besov: return 1.0 / std::sqrt(rising_binom(s_, k));
    case WeightKind::dirichlet: return std::pow(kd + 1.0, -s_ / 2.0);
    case WeightKind::harmonic: return kd + 1.0;
    case WeightKind::harmonic_sq: return (kd + 1.0) * (kd + 1.0);
    case WeightKind::inverse_square: {
      double r = 1.0;
      for (int j = 1; j <= k; ++j) r /= (static_cast<double>(j) + 1.0) * (static_cast<double>(j) + 1.0);
      return r;
    }
    case WeightKind::constant: return std::pow(s_, kd);
    case WeightKind::interpolated:
    case WeightKind::level_table:
      if (k > cap_) {
        if (zero_beyond_) return 0.0;
        fail("cap-exceeded", "level " + std::to_string(k) + " beyond the weight table cap " +
                                 std::to_string(cap_));
      }
      return norm_levels_[static_cast<std::size_t>(k)];
    default: fail("bad-weight-kind", "norm_level on word-indexed weights");
  }
}

double WeightSequence::b_level(int k) const {
  require(k >= 0, "bad-length", "b_level needs k >= 0");
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  switch (kind_) {
    case WeightKind::unit: return 1.0;
    case WeightKind::besov: return rising_binom(s_, k);
    case WeightKind::dirichlet: return std::pow(kd + 1.0, s_);
    case WeightKind::harmonic: return 1.0 / ((kd + 1.0) * (kd + 1.0));
    case WeightKind::harmonic_sq: {
      const double q = (kd + 1.0) * (kd + 1.0);
      return 1.0 / (q * q);
    }
    case WeightKind::inverse_square: {
      double r = 1.0;
      for (int j = 1; j <= k; ++j) {
        const double f = (static_cast<double>(j) + 1.0) * (static_cast<double>(j) + 1.0);
        r *= f * f;
      }
      return r;
    }
    case WeightKind::constant: {
      require(s_ > 0.0, "zero-weight", "b-weight undefined for vanishing weights");
      return std::pow(s_, -2.0 * kd);
    }
    default: {
      const double nl = norm_level(k);
      require(nl > 0.0, "zero-weight", "b-weight undefined on a zero chain");
      return 1.0 / (nl * nl);
    }
  }
}

double WeightSequence::mu(const Word& beta) const {
  if (beta.empty()) return 1.0;  // convention mu_{g0} = 1
  for (int c : beta)
    require(c >= 1 && c <= n_, "bad-word",
            "letter " + std::to_string(c) + " outside 1.." + std::to_string(n_));
  const int len = static_cast<int>(beta.size());
  if (length_only()) return mu_level(len);
  if (len > cap_)
    fail("cap-exceeded",
         "word length " + std::to_string(len) + " beyond the weight table cap " + std::to_string(cap_));
  if (kind_ == WeightKind::indexed) return by_index_[graded_index(beta, n_)];
  const auto it = table_.find(beta);
  return it == table_.end() ? 0.0 : it->second;
}

double mu_norm(const WeightSequence& w, const Word& alpha) {
  if (w.length_only()) return w.norm_level(static_cast<int>(alpha.size()));
  double r = 1.0;
  Word suffix = alpha;
  while (!suffix.empty()) {
    r *= w.mu(suffix);
    if (r == 0.0) return 0.0;
    suffix.erase(suffix.begin());
  }
  return r;
}

double mu_chain_level(const WeightSequence& w, int k, int m) {
  require(w.length_only(), "bad-weight-kind", "level chains need length-only weights");
  require(k >= 0 && m >= 0, "bad-length", "chain lengths must be >= 0");
  if (k == 0) return 1.0;
  const double base = w.norm_level(m);
  if (base == 0.0) return 0.0;  // zero tails are terminal, so the chain vanishes too
  const double v = w.norm_level(m + k) / base;
  // Submultiplicativity certified at construction means interior chains
  // never exceed a_k; clamp the division rounding to keep that exact.
  if (w.kind() == WeightKind::interpolated) return std::min(v, w.norm_level(k));
  return v;
}

double mu_chain(const WeightSequence& w, const Word& beta, const Word& alpha) {
  if (beta.empty()) return 1.0;
  if (w.length_only())
    return mu_chain_level(w, static_cast<int>(beta.size()), static_cast<int>(alpha.size()));
  double r = 1.0;
  Word word = beta;
  word.insert(word.end(), alpha.begin(), alpha.end());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    r *= w.mu(Word(word.begin() + static_cast<std::ptrdiff_t>(j), word.end()));
    if (r == 0.0) return 0.0;
  }
  return r;
}

double b_weight(const WeightSequence& w, const Word& alpha) {
  if (w.length_only()) return w.b_level(static_cast<int>(alpha.size()));
  const double nl = mu_norm(w, alpha);
  require(nl > 0.0, "zero-weight",
          "b-weight undefined on the zero chain at \"" + word_to_string(alpha) + "\"");
  return 1.0 / (nl * nl);
}

double mu_right(const WeightSequence& w, const Word& alpha, int i) {
  require(i >= 1 && i <= w.n(), "bad-word", "generator index outside 1..n");
  if (w.length_only()) return w.mu_level(static_cast<int>(alpha.size()) + 1);
  const double base = mu_norm(w, alpha);
  require(base > 0.0, "zero-weight",
          "right weight undefined above the zero chain at \"" + word_to_string(alpha) + "\"");
  Word ext = alpha;
  ext.push_back(i);
  return mu_norm(w, ext) / base;
}

double class_sum_b(const WeightSequence& w, const MultiIndex& k) {
  require(static_cast<int>(k.size()) == w.n(), "bad-multiindex",
          "multi-index arity does not match the weight alphabet");
  if (w.length_only()) return multinomial(k) * w.b_level(total_degree(k));
  require(multinomial(k) <= static_cast<double>(default_limits().max_dim), "resource-cap",
          "abelianization class too large for a word sum");
  double sum = 0.0;
  for (const Word& word : words_in_class(k)) sum += b_weight(w, word);
  return sum;
}

namespace {

std::optional<double> certified_left_sup(const WeightSequence& w) {
  switch (w.kind()) {
    case WeightKind::unit: return 1.0;
    case WeightKind::besov: return w.param() >= 1.0 ? 1.0 : std::sqrt(1.0 / w.param());
    case WeightKind::dirichlet: return w.param() >= 0.0 ? 1.0 : std::pow(2.0, -w.param() / 2.0);
    case WeightKind::harmonic: return 2.0;
    case WeightKind::harmonic_sq: return 4.0;
    case WeightKind::inverse_square: return 0.25;
    case WeightKind::constant: return w.param();
    default: return std::nullopt;
  }
}

}  // namespace

BoundednessReport boundedness_report(const WeightSequence& w, int max_len) {
  require(max_len >= 1, "bad-length", "boundedness scan needs max_len >= 1");
  BoundednessReport rep;
  rep.max_len = max_len;
  const auto certified = certified_left_sup(w);
  // Whole-domain scans of capped kinds also pin the exact supremum (a
  // zero tail beyond the cap cannot raise it).
  const bool capped_covered = w.cap() != WeightSequence::no_cap && max_len >= w.cap();

  std::vector<Word> words;
  if (!w.length_only()) {
    check_space_cap(w.n(), max_len);
    words = enumerate_words(w.n(), max_len - 1);
  }

  for (int i = 1; i <= w.n(); ++i) {
    GeneratorBound g;
    g.gen = i;
    g.left_level_max.assign(static_cast<std::size_t>(max_len), 0.0);
    g.right_level_max.assign(static_cast<std::size_t>(max_len), 0.0);
    if (w.length_only()) {
      for (int m = 0; m < max_len; ++m) {
        const double v = w.mu_level(m + 1);  // both extensions of a length-m word
        g.left_level_max[static_cast<std::size_t>(m)] = v;
        g.right_level_max[static_cast<std::size_t>(m)] = v;
      }
    } else {
      for (const Word& alpha : words) {
        const std::size_t m = alpha.size();
        Word left = alpha;
        left.insert(left.begin(), i);
        g.left_level_max[m] = std::max(g.left_level_max[m], w.mu(left));
        if (mu_norm(w, alpha) > 0.0)
          g.right_level_max[m] = std::max(g.right_level_max[m], mu_right(w, alpha, i));
      }
    }
    g.left_sup = *std::max_element(g.left_level_max.begin(), g.left_level_max.end());
    g.right_sup = *std::max_element(g.right_level_max.begin(), g.right_level_max.end());
    g.certified_sup = certified;
    if (certified || capped_covered) {
      g.verdict = "certified";
      if (!g.certified_sup) g.certified_sup = g.left_sup;
    } else {
      // Strict growth across the last scanned levels suggests an unbounded sup.
      bool growing = max_len >= 3;
      for (int m = std::max(1, max_len - 3); m < max_len && growing; ++m)
        growing = g.left_level_max[static_cast<std::size_t>(m)] >
                  g.left_level_max[static_cast<std::size_t>(m - 1)];
      g.verdict = growing ? "unbounded-suspected" : "bounded-within-scan";
    }
    rep.generators.push_back(std::move(g));
  }
  return rep;
}

}  // namespace fockshift
