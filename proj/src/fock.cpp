#include "fockshift/fock.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include "fockshift/errors.hpp"

namespace fockshift {

namespace {

Word drop_first(const Word& w) { return Word(w.begin() + 1, w.end()); }

Word ones(int len) { return Word(static_cast<std::size_t>(len), 1); }

// Run fn over [0, total) in contiguous chunks; chunk results must be combined
// by the caller in chunk order so the reduction stays deterministic.
void for_chunks(std::size_t total, int threads,
                const std::function<void(int, std::size_t, std::size_t)>& fn) {
  const int want = std::max(1, threads);
  if (want == 1 || total < 8192) {
    fn(0, 0, total);
    return;
  }
  const int parts = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(want), total));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(parts));
  const std::size_t step = (total + static_cast<std::size_t>(parts) - 1) / static_cast<std::size_t>(parts);
  for (int c = 0; c < parts; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * step;
    const std::size_t hi = std::min(total, lo + step);
    if (lo >= hi) break;
    pool.emplace_back(fn, c, lo, hi);
  }
  for (auto& th : pool) th.join();
}

struct ArgMax {
  double value = -1.0;
  std::size_t index = 0;
  void offer(double v, std::size_t i) {
    if (v > value) {
      value = v;
      index = i;
    }
  }
  void merge(const ArgMax& other) { offer(other.value, other.index); }
};

}  // namespace

TruncatedFock make_space(int n, int N, const Limits& lim) {
  check_space_cap(n, N, lim);
  return TruncatedFock{n, N, graded_dim(n, N)};
}

WordTable WordTable::build(int n, int N, const Limits& lim) {
  WordTable t;
  t.space = make_space(n, N, lim);
  t.words = enumerate_words(n, N);
  t.tail.resize(t.words.size());
  t.tail[0] = 0;
  for (std::size_t i = 1; i < t.words.size(); ++i)
    t.tail[i] = graded_index(drop_first(t.words[i]), n);
  t.level_begin.resize(static_cast<std::size_t>(N) + 2);
  t.level_begin[0] = 0;
  std::size_t level = 1;
  for (int k = 0; k <= N; ++k) {
    t.level_begin[static_cast<std::size_t>(k) + 1] = t.level_begin[static_cast<std::size_t>(k)] + level;
    level *= static_cast<std::size_t>(n);
  }
  return t;
}

namespace {

// Shared enumeration of the sparse entries of the four shift variants:
// emit(row, col, weight) for every stored entry.
void shift_entries(const WordTable& t, const WeightSequence& w, int gen, Side side, bool adjoint,
                   const std::function<void(std::size_t, std::size_t, double)>& emit,
                   const CVec* touch) {
  const int n = t.space.n;
  const int N = t.space.N;
  require(gen >= 1 && gen <= n, "bad-word", "generator index outside 1..n");
  const auto& b = t.level_begin;
  const bool lonly = w.length_only();

  if (side == Side::left) {
    // Column alpha -> row g_i alpha with weight mu_{g_i alpha} (adjoint flips).
    for (int m = 0; m < N; ++m) {
      const std::size_t width = b[static_cast<std::size_t>(m) + 1] - b[static_cast<std::size_t>(m)];
      for (std::size_t r = 0; r < width; ++r) {
        const std::size_t col = b[static_cast<std::size_t>(m)] + r;
        const std::size_t row =
            b[static_cast<std::size_t>(m) + 1] + static_cast<std::size_t>(gen - 1) * width + r;
        const double mu = w.mu(t.words[row]);
        if (mu == 0.0) continue;
        if (adjoint) emit(col, row, mu);
        else emit(row, col, mu);
      }
    }
    return;
  }

  // Right side: column alpha -> row alpha g_i with weight
  // mu(alpha g_i, g0)/mu(alpha, g0); undefined above dead words.
  for (int m = 0; m < N; ++m) {
    const std::size_t lo = b[static_cast<std::size_t>(m)];
    const std::size_t hi = b[static_cast<std::size_t>(m) + 1];
    for (std::size_t col = lo; col < hi; ++col) {
      const std::size_t row =
          b[static_cast<std::size_t>(m) + 1] + (col - lo) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(gen - 1);
      double weight = 0.0;
      if (lonly) {
        weight = w.mu_level(m + 1);
      } else {
        const std::size_t src = adjoint ? row : col;
        if (touch && (*touch)(static_cast<Eigen::Index>(src)) == std::complex<double>(0.0, 0.0))
          continue;  // pure application: dead words are only an error when touched
        weight = mu_right(w, t.words[col], gen);
      }
      if (weight == 0.0) continue;
      if (adjoint) emit(col, row, weight);
      else emit(row, col, weight);
    }
  }
}

}  // namespace

CVec apply_shift(const WordTable& t, const WeightSequence& w, int gen, Side side, bool adjoint,
                 const CVec& v) {
  require(v.size() == static_cast<Eigen::Index>(t.space.dim), "dim-mismatch",
          "vector length does not match the truncated dimension");
  CVec out = CVec::Zero(v.size());
  shift_entries(
      t, w, gen, side, adjoint,
      [&](std::size_t row, std::size_t col, double weight) {
        out(static_cast<Eigen::Index>(row)) += weight * v(static_cast<Eigen::Index>(col));
      },
      &v);
  return out;
}

SpMat shift_matrix(const WordTable& t, const WeightSequence& w, int gen, Side side, bool adjoint) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(t.space.dim);
  shift_entries(
      t, w, gen, side, adjoint,
      [&](std::size_t row, std::size_t col, double weight) {
        trip.emplace_back(static_cast<int>(row), static_cast<int>(col), weight);
      },
      nullptr);
  SpMat m(static_cast<Eigen::Index>(t.space.dim), static_cast<Eigen::Index>(t.space.dim));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

LevelNorm level_row_norm(const WeightSequence& w, int k, int N, int threads, const Limits& lim) {
  require(k >= 1, "bad-level", "level index must be >= 1");
  require(k <= N, "bad-level", "level index exceeds the truncation level");
  LevelNorm out;
  out.k = k;
  out.N = N;

  if (w.length_only()) {
    ArgMax best;
    for (int m = 0; m + k <= N; ++m)
      best.offer(mu_chain_level(w, k, m), static_cast<std::size_t>(m));
    out.value = std::max(best.value, 0.0);
    out.beta = ones(k);
    out.alpha = ones(static_cast<int>(best.index));
    out.boundary_value = mu_chain_level(w, k, N - k);
    out.boundary_beta = ones(k);
    out.boundary_alpha = ones(N - k);
    return out;
  }

  const WordTable t = WordTable::build(w.n(), N, lim);
  const std::size_t dim = t.space.dim;
  std::vector<double> muv(dim, 1.0);
  std::vector<ArgMax> locals;

  for_chunks(dim, threads, [&](int, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      if (!t.words[i].empty()) muv[i] = w.mu(t.words[i]);
  });

  // chain[i] after step s = product of the s longest suffixes of words[i],
  // i.e. mu(first-s-letters, rest); undefined (unused) below length s.
  std::vector<double> prev(dim, 1.0), cur(dim, 0.0);
  for (int s = 1; s <= k; ++s) {
    for_chunks(dim, threads, [&](int, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i)
        cur[i] = t.words[i].size() >= static_cast<std::size_t>(s) ? muv[i] * prev[t.tail[i]] : 0.0;
    });
    std::swap(prev, cur);
  }

  const std::size_t scan_lo = t.level_begin[static_cast<std::size_t>(k)];
  ArgMax best, boundary;
  {
    const std::size_t slots = static_cast<std::size_t>(std::max(1, threads));
    std::vector<ArgMax> chunk_best(slots), chunk_boundary(slots);
    for_chunks(dim - scan_lo, threads, [&](int c, std::size_t lo, std::size_t hi) {
      ArgMax lb, lbnd;
      for (std::size_t off = lo; off < hi; ++off) {
        const std::size_t i = scan_lo + off;
        lb.offer(prev[i], i);
        if (t.words[i].size() == static_cast<std::size_t>(N)) lbnd.offer(prev[i], i);
      }
      chunk_best[static_cast<std::size_t>(c)] = lb;
      chunk_boundary[static_cast<std::size_t>(c)] = lbnd;
    });
    for (std::size_t c = 0; c < slots; ++c) {
      best.merge(chunk_best[c]);
      boundary.merge(chunk_boundary[c]);
    }
  }

  const auto split = [&](std::size_t i, Word& beta, Word& alpha) {
    const Word& word = t.words[i];
    beta = Word(word.begin(), word.begin() + k);
    alpha = Word(word.begin() + k, word.end());
  };
  out.value = std::max(best.value, 0.0);
  split(best.index, out.beta, out.alpha);
  out.boundary_value = std::max(boundary.value, 0.0);
  split(boundary.index, out.boundary_beta, out.boundary_alpha);
  return out;
}

std::optional<double> certified_level_value(const WeightSequence& w, int k) {
  require(k >= 1, "bad-level", "level index must be >= 1");
  const double kd = static_cast<double>(k);
  switch (w.kind()) {
    case WeightKind::unit: return 1.0;
    case WeightKind::constant: return std::pow(w.param(), kd);
    case WeightKind::harmonic: return kd + 1.0;  // attained at alpha = g0
    case WeightKind::harmonic_sq: return (kd + 1.0) * (kd + 1.0);
    case WeightKind::inverse_square: return w.norm_level(k);  // chains decay in |alpha|
    case WeightKind::besov:
      return w.param() >= 1.0 ? 1.0 : w.norm_level(k);  // sup at |alpha| -> inf resp. alpha = g0
    case WeightKind::dirichlet: return w.param() >= 0.0 ? 1.0 : w.norm_level(k);
    case WeightKind::interpolated: {
      // Submultiplicative level data: sup = a_k, attained at alpha = g0.
      if (k <= w.cap()) return w.a_data()[static_cast<std::size_t>(k)];
      if (w.zero_beyond_cap()) return 0.0;
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

double dense_level_norm(const WordTable& t, const WeightSequence& w, int k) {
  require(k >= 1 && k <= t.space.N, "bad-level", "level index outside 1..N");
  const int n = t.space.n;
  const Eigen::Index dim = static_cast<Eigen::Index>(t.space.dim);
  std::vector<Eigen::MatrixXd> gens;
  gens.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) gens.push_back(Eigen::MatrixXd(shift_matrix(t, w, i, Side::left)));

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  // S = sum over |beta| = k of W_beta W_beta^T, sharing suffix products.
  std::function<void(int, const Eigen::MatrixXd&)> rec = [&](int depth, const Eigen::MatrixXd& p) {
    if (depth == 0) {
      sum += p * p.transpose();
      return;
    }
    for (int i = 0; i < n; ++i) rec(depth - 1, gens[static_cast<std::size_t>(i)] * p);
  };
  rec(k, Eigen::MatrixXd::Identity(dim, dim));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sum, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

RadiusReport joint_radius_estimate(const WeightSequence& w, int N, int threads, const Limits& lim) {
  require(N >= 2, "bad-length", "radius scan needs N >= 2");
  RadiusReport rep;
  rep.N = N;
  for (int k = 1; k <= N; ++k) {
    const double v = level_row_norm(w, k, N, threads, lim).value;
    rep.level_values.push_back(v);
    rep.roots.push_back(v > 0.0 ? std::pow(v, 1.0 / static_cast<double>(k)) : 0.0);
  }
  const int window = std::min(3, N);
  rep.estimate = *std::max_element(rep.roots.end() - window, rep.roots.end());
  switch (w.kind()) {
    case WeightKind::unit:
    case WeightKind::besov:
    case WeightKind::dirichlet:
    case WeightKind::harmonic:
    case WeightKind::harmonic_sq: rep.exact = 1.0; break;
    case WeightKind::constant: rep.exact = w.param(); break;
    case WeightKind::inverse_square: rep.exact = 0.0; break;
    case WeightKind::interpolated:
    case WeightKind::level_table:
      if (w.zero_beyond_cap()) rep.exact = 0.0;  // nilpotent
      break;
    default: break;
  }
  rep.note = rep.exact ? "window estimate plus exact closed-form limit"
                       : "window estimate from truncated level scans; not a certified bound";
  return rep;
}

namespace {

std::string trend_verdict(const std::vector<double>& seq) {
  if (!seq.empty() && seq.back() == 0.0) return "decaying-evidence";  // dead tail
  if (seq.size() < 3) return "undetermined";
  const double a = seq[seq.size() - 3], b = seq[seq.size() - 2], c = seq[seq.size() - 1];
  if (b < a && c < b) return "decaying-evidence";
  if (b >= a && c >= b) return "non-decaying";
  return "undetermined";
}

std::string ratio_verdict(const std::vector<double>& level_sums) {
  if (level_sums.back() == 0.0) return "summable-evidence";  // finite sum
  if (level_sums.size() < 4) return "undetermined";
  bool all_small = true, all_big = true;
  for (std::size_t m = level_sums.size() - 3; m < level_sums.size(); ++m) {
    if (level_sums[m - 1] == 0.0) return "summable-evidence";
    const double r = level_sums[m] / level_sums[m - 1];
    all_small = all_small && r < 0.95;
    all_big = all_big && r >= 1.0;
  }
  if (all_small) return "summable-evidence";
  if (all_big) return "divergent-evidence";
  return "undetermined";
}

}  // namespace

ClassifyReport classify(const WeightSequence& w, int N, std::optional<double> M, const Limits& lim) {
  require(N >= 1, "bad-length", "classification needs N >= 1");
  ClassifyReport rep;
  rep.N = N;
  rep.bound_M = M;

  rep.scan_sup_chain = 0.0;
  for (int k = 1; k <= N; ++k)
    rep.scan_sup_chain = std::max(rep.scan_sup_chain, level_row_norm(w, k, N, 1, lim).value);
  if (M) rep.power_bounded_within_scan = rep.scan_sup_chain <= *M;

  const int n = w.n();
  if (w.length_only()) {
    rep.injective = true;
    rep.row_contraction = true;
    for (int k = 1; k <= N; ++k) {
      const double mu = w.mu_level(k);
      rep.injective = rep.injective && mu > 0.0;
      rep.row_contraction = rep.row_contraction && mu <= 1.0;
    }
    for (int i = 1; i <= n; ++i) {
      GeneratorEvidence g;
      g.gen = i;
      std::vector<double> l2_level;
      double count = 1.0;  // n^m
      for (int m = 0; m < N; ++m) {
        const double mu = w.mu_level(m + 1);
        g.level_max.push_back(mu);
        g.l1_partial += count * mu;
        g.l2_partial += count * mu * mu;
        l2_level.push_back(count * mu * mu);
        const double prev = m >= 1 ? w.mu_level(m) : 0.0;
        g.defect_min.push_back(mu * mu - prev * prev);
        g.defect_max.push_back(mu * mu - prev * prev);
        count *= static_cast<double>(n);
      }
      g.sup_mu = *std::max_element(g.level_max.begin(), g.level_max.end());
      g.compact_verdict = trend_verdict(g.level_max);
      g.l2_verdict = ratio_verdict(l2_level);
      rep.generators.push_back(std::move(g));
    }
    return rep;
  }

  const WordTable t = WordTable::build(n, N, lim);
  rep.injective = true;
  rep.row_contraction = true;
  std::vector<double> muv(t.space.dim, 1.0);
  for (std::size_t i = 1; i < t.space.dim; ++i) {
    muv[i] = w.mu(t.words[i]);
    rep.injective = rep.injective && muv[i] > 0.0;
    rep.row_contraction = rep.row_contraction && muv[i] <= 1.0;
  }

  for (int i = 1; i <= n; ++i) {
    GeneratorEvidence g;
    g.gen = i;
    g.level_max.assign(static_cast<std::size_t>(N), 0.0);
    g.defect_min.assign(static_cast<std::size_t>(N), 0.0);
    g.defect_max.assign(static_cast<std::size_t>(N), 0.0);
    std::vector<double> l2_level(static_cast<std::size_t>(N), 0.0);
    std::vector<bool> seen(static_cast<std::size_t>(N), false);
    const auto& b = t.level_begin;
    for (int m = 0; m < N; ++m) {
      const std::size_t width = b[static_cast<std::size_t>(m) + 1] - b[static_cast<std::size_t>(m)];
      for (std::size_t r = 0; r < width; ++r) {
        const std::size_t col = b[static_cast<std::size_t>(m)] + r;
        const std::size_t ext =
            b[static_cast<std::size_t>(m) + 1] + static_cast<std::size_t>(i - 1) * width + r;
        const double mu = muv[ext];
        const std::size_t mi = static_cast<std::size_t>(m);
        g.level_max[mi] = std::max(g.level_max[mi], mu);
        g.l1_partial += mu;
        g.l2_partial += mu * mu;
        l2_level[mi] += mu * mu;
        const double base = m >= 1 ? muv[col] : 0.0;
        const double defect = mu * mu - base * base;
        if (!seen[mi]) {
          g.defect_min[mi] = g.defect_max[mi] = defect;
          seen[mi] = true;
        } else {
          g.defect_min[mi] = std::min(g.defect_min[mi], defect);
          g.defect_max[mi] = std::max(g.defect_max[mi], defect);
        }
      }
    }
    g.sup_mu = *std::max_element(g.level_max.begin(), g.level_max.end());
    g.compact_verdict = trend_verdict(g.level_max);
    g.l2_verdict = ratio_verdict(l2_level);
    rep.generators.push_back(std::move(g));
  }
  return rep;
}

DecomposeReport reduce_decompose(const WeightSequence& w, int N, const Limits& lim) {
  require(N >= 1, "bad-length", "decomposition needs N >= 1");
  const WordTable t = WordTable::build(w.n(), N, lim);
  const std::size_t dim = t.space.dim;
  std::vector<double> muv(dim, 1.0);
  for (std::size_t i = 1; i < dim; ++i) muv[i] = w.mu(t.words[i]);

  DecomposeReport rep;
  rep.N = N;
  rep.pattern_valid = true;
  for (std::size_t i = 1; i < dim; ++i)
    if (muv[i] != 0.0 && t.words[i].size() >= 2 && muv[t.tail[i]] == 0.0) {
      rep.pattern_valid = false;
      break;
    }

  std::vector<std::size_t> parent(dim);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 1; i < dim; ++i)
    if (muv[i] != 0.0) {
      const std::size_t a = find(i), b = find(t.tail[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

  // Components keyed by their smallest index, listed in that order.
  std::vector<std::size_t> root_slot(dim, dim);
  std::vector<Component> comps;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t r = find(i);
    if (root_slot[r] == dim) {
      root_slot[r] = comps.size();
      comps.push_back(Component{});
    }
    comps[root_slot[r]].indices.push_back(i);
  }

  const int n = w.n();
  const auto& b = t.level_begin;
  for (Component& comp : comps) {
    for (std::size_t idx : comp.indices) {
      const int m = t.level_of(idx);
      if (m >= N) continue;
      const std::size_t lo = b[static_cast<std::size_t>(m)];
      const std::size_t width = b[static_cast<std::size_t>(m) + 1] - lo;
      for (int i = 0; i < n && !comp.truncated_type; ++i) {
        const std::size_t ext =
            b[static_cast<std::size_t>(m) + 1] + static_cast<std::size_t>(i) * width + (idx - lo);
        if (muv[ext] == 0.0) comp.truncated_type = true;
      }
      if (comp.truncated_type) break;
    }
  }
  rep.components = std::move(comps);
  return rep;
}

}  // namespace fockshift
