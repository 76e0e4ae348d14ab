#include "fockshift/freeword.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "fockshift/errors.hpp"

namespace fockshift {

namespace {

void check_alphabet(int n) {
  require(n >= 1, "bad-alphabet", "number of generators must be >= 1");
}

void check_letters(const Word& w, int n) {
  for (int c : w)
    require(c >= 1 && c <= n, "bad-word",
            "letter " + std::to_string(c) + " outside 1.." + std::to_string(n));
}

}  // namespace

std::size_t graded_dim(int n, int max_len) {
  check_alphabet(n);
  require(max_len >= 0, "bad-length", "max word length must be >= 0");
  const std::size_t cap = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0, level = 1;
  for (int k = 0; k <= max_len; ++k) {
    require(total <= cap - level, "dim-overflow", "graded dimension overflows size_t");
    total += level;
    if (k < max_len) {
      require(level <= cap / static_cast<std::size_t>(n), "dim-overflow",
              "graded dimension overflows size_t");
      level *= static_cast<std::size_t>(n);
    }
  }
  return total;
}

std::size_t graded_index(const Word& w, int n) {
  check_alphabet(n);
  check_letters(w, n);
  // offset(k) = #words of length < k, then rank within the level base-n.
  std::size_t offset = 0, level = 1;
  for (std::size_t k = 0; k < w.size(); ++k) {
    offset += level;
    level *= static_cast<std::size_t>(n);
  }
  std::size_t rank = 0;
  for (int c : w) rank = rank * static_cast<std::size_t>(n) + static_cast<std::size_t>(c - 1);
  return offset + rank;
}

Word word_at(std::size_t index, int n) {
  check_alphabet(n);
  std::size_t level = 1;  // size of the current length-k level
  std::size_t k = 0;
  while (index >= level) {
    index -= level;
    level *= static_cast<std::size_t>(n);
    ++k;
  }
  Word w(k);
  for (std::size_t j = k; j-- > 0;) {
    w[j] = static_cast<int>(index % static_cast<std::size_t>(n)) + 1;
    index /= static_cast<std::size_t>(n);
  }
  return w;
}

std::vector<Word> enumerate_words(int n, int max_len) {
  const std::size_t dim = graded_dim(n, max_len);
  std::vector<Word> out;
  out.reserve(dim);
  out.push_back(unit_word());
  // Level k = every letter prepended (letter-major) to level k-1; since the
  // previous level is lex-sorted, each new level comes out lex-sorted too.
  std::size_t lo = 0, hi = 1;
  for (int k = 1; k <= max_len; ++k) {
    for (int c = 1; c <= n; ++c)
      for (std::size_t i = lo; i < hi; ++i) {
        Word w;
        w.reserve(out[i].size() + 1);
        w.push_back(c);
        w.insert(w.end(), out[i].begin(), out[i].end());
        out.push_back(std::move(w));
      }
    lo = hi;
    hi = out.size();
  }
  return out;
}

MultiIndex abelianize(const Word& w, int n) {
  check_alphabet(n);
  check_letters(w, n);
  MultiIndex k(static_cast<std::size_t>(n), 0);
  for (int c : w) ++k[static_cast<std::size_t>(c - 1)];
  return k;
}

std::vector<Word> words_in_class(const MultiIndex& k) {
  const int n = static_cast<int>(k.size());
  check_alphabet(n);
  Word sorted;
  for (int i = 0; i < n; ++i) {
    require(k[static_cast<std::size_t>(i)] >= 0, "bad-multiindex",
            "multi-index entries must be >= 0");
    for (int r = 0; r < k[static_cast<std::size_t>(i)]; ++r) sorted.push_back(i + 1);
  }
  std::vector<Word> out;
  // std::next_permutation over the sorted letter multiset walks exactly the
  // distinct rearrangements in lex order.
  do {
    out.push_back(sorted);
  } while (std::next_permutation(sorted.begin(), sorted.end()));
  return out;
}

double multinomial(const MultiIndex& k) {
  double result = 1.0;
  int seen = 0;
  for (int v : k) {
    require(v >= 0, "bad-multiindex", "multi-index entries must be >= 0");
    // Multiply C(seen + j, j) for j = 1..v incrementally to stay stable.
    for (int j = 1; j <= v; ++j) {
      ++seen;
      result *= static_cast<double>(seen) / static_cast<double>(j);
    }
  }
  return result;
}

std::string word_to_string(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

Word parse_word(const std::string& s, int n) {
  check_alphabet(n);
  require(!s.empty(), "bad-word", "empty word string (the unit word is \"e\")");
  if (s == "e") return unit_word();
  Word w;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '.')) {
    require(!part.empty(), "bad-word", "malformed word string: " + s);
    int c = 0;
    try {
      std::size_t pos = 0;
      c = std::stoi(part, &pos);
      require(pos == part.size(), "bad-word", "malformed word string: " + s);
    } catch (const std::exception&) {
      fail("bad-word", "malformed word string: " + s);
    }
    w.push_back(c);
  }
  require(!s.empty() && s.back() != '.', "bad-word", "malformed word string: " + s);
  check_letters(w, n);
  return w;
}

std::string multi_to_string(const MultiIndex& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(k[i]);
  }
  return s;
}

MultiIndex parse_multi(const std::string& s, int n) {
  check_alphabet(n);
  MultiIndex k;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    require(!part.empty(), "bad-multiindex", "malformed multi-index string: " + s);
    int v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoi(part, &pos);
      require(pos == part.size(), "bad-multiindex", "malformed multi-index string: " + s);
    } catch (const std::exception&) {
      fail("bad-multiindex", "malformed multi-index string: " + s);
    }
    require(v >= 0, "bad-multiindex", "multi-index entries must be >= 0");
    k.push_back(v);
  }
  require(static_cast<int>(k.size()) == n, "bad-multiindex",
          "multi-index has " + std::to_string(k.size()) + " entries, expected " +
              std::to_string(n));
  return k;
}

}  // namespace fockshift
