#pragma once

#include <cstddef>

namespace fockshift {

// Resource caps. Operations error beyond the caps rather than silently
// switching algorithms; max_dim is overridable via FOCKSHIFT_MAX_DIM.
struct Limits {
  int max_n = 4;
  int max_N = 10;
  std::size_t max_dim = 50000;
};

const Limits& default_limits();

// Guards: alphabet size, and the full truncated dimension sum_{k<=N} n^k.
void check_alphabet_cap(int n, const Limits& lim = default_limits());
void check_space_cap(int n, int N, const Limits& lim = default_limits());

}  // namespace fockshift
