#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fockshift {

// A word in the free semigroup on n generators. Letters are 1..n, the empty
// word is the unit. Words are immutable values; all operations below are pure.
using Word = std::vector<int>;

// Exponent vector in N_0^n (letter counts after abelianization).
using MultiIndex = std::vector<int>;

inline Word unit_word() { return {}; }

// Number of words of length <= max_len: sum_{k=0}^{max_len} n^k.
// Throws error("dim-overflow") if the count does not fit in size_t.
std::size_t graded_dim(int n, int max_len);

// Position of w in the graded lexicographic enumeration (unit word first,
// then length 1 in lex order, ...). Inverse of word_at.
std::size_t graded_index(const Word& w, int n);
Word word_at(std::size_t index, int n);

// All words of length <= max_len in graded-lex order; size == graded_dim.
std::vector<Word> enumerate_words(int n, int max_len);

MultiIndex abelianize(const Word& w, int n);

// All words whose abelianization equals k, in lex order.
// The count is the multinomial |k|! / prod k_i!.
std::vector<Word> words_in_class(const MultiIndex& k);
double multinomial(const MultiIndex& k);

inline int total_degree(const MultiIndex& k) {
  int t = 0;
  for (int v : k) t += v;
  return t;
}

// Serialization: unit word is "e", otherwise dot-separated letters "1.2.1".
std::string word_to_string(const Word& w);
Word parse_word(const std::string& s, int n);

// Multi-index serialization: comma-separated counts "2,0,1".
std::string multi_to_string(const MultiIndex& k);
MultiIndex parse_multi(const std::string& s, int n);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int c : w) {
      h ^= static_cast<std::size_t>(c);
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Graded-lex comparison (length first, then lexicographic on letters).
struct GradedLess {
  bool operator()(const Word& a, const Word& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

}  // namespace fockshift
