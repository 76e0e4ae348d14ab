#include "fockshift/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fockshift/errors.hpp"
#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"

namespace fockshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lambda_max_psd(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

std::pair<double, double> lambda_range_herm(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

// One pass of X -> sum_i T_i X T_i*.
Eigen::MatrixXcd cp_apply(const OperatorTuple& t, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(t.d, t.d);
  for (const auto& ti : t.T) y += ti * x * ti.adjoint();
  return y;
}

struct CpScan {
  std::vector<double> h;     // ||phi^k(Q)||, 0 once the iteration dies (or underflows)
  std::vector<double> logh;  // overflow-safe companion
  std::optional<int> nilpotent_index;  // first k with phi^k(Q) = 0 exactly
};

// Shared by every consumer of the level norms so repeated scans of the same
// tuple reproduce identical doubles. Each step renormalises by the previous
// norm; h accumulates the products (and may overflow to inf), logh never does.
CpScan cp_scan(const OperatorTuple& t, const Eigen::MatrixXcd& q, int kmax) {
  CpScan s;
  s.h.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  s.logh.assign(static_cast<std::size_t>(kmax) + 1, kNegInf);
  Eigen::MatrixXcd x = q;
  double step = lambda_max_psd(x);
  s.h[0] = step;
  if (step == 0.0) {
    s.nilpotent_index = 0;
    return s;
  }
  s.logh[0] = std::log(step);
  for (int k = 1; k <= kmax; ++k) {
    x = cp_apply(t, x / step);
    step = lambda_max_psd(x);
    if (step == 0.0) {
      s.nilpotent_index = k;
      break;
    }
    s.h[static_cast<std::size_t>(k)] = s.h[static_cast<std::size_t>(k - 1)] * step;
    s.logh[static_cast<std::size_t>(k)] = s.logh[static_cast<std::size_t>(k - 1)] + std::log(step);
  }
  return s;
}

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

OperatorTuple make_tuple(int n, int d, std::vector<Eigen::MatrixXcd> mats) {
  require(n >= 1, "bad-alphabet", "tuple needs at least one entry");
  require(d >= 1, "bad-dimension", "matrices must act on a space of dimension >= 1");
  require(mats.size() == static_cast<std::size_t>(n), "shape-mismatch",
          "expected " + std::to_string(n) + " matrices, got " + std::to_string(mats.size()));
  for (const auto& m : mats)
    require(m.rows() == d && m.cols() == d, "shape-mismatch",
            "every matrix must be " + std::to_string(d) + " x " + std::to_string(d));
  return OperatorTuple{n, d, std::move(mats)};
}

bool is_commuting(const OperatorTuple& t, double tol) {
  for (int i = 0; i < t.n; ++i)
    for (int j = i + 1; j < t.n; ++j)
      if (((t.T[i] * t.T[j] - t.T[j] * t.T[i]).cwiseAbs().maxCoeff()) > tol) return false;
  return true;
}

TupleStats tuple_stats(const OperatorTuple& t, int kmax) {
  require(kmax >= 1, "bad-length", "norm scan needs kmax >= 1");
  const CpScan scan = cp_scan(t, Eigen::MatrixXcd::Identity(t.d, t.d), kmax);
  TupleStats st;
  st.level_norms = scan.h;
  st.log_norms = scan.logh;
  st.nilpotent_index = scan.nilpotent_index;
  st.roots.reserve(static_cast<std::size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    const double lg = scan.logh[static_cast<std::size_t>(k)];
    st.roots.push_back(lg == kNegInf ? 0.0 : std::exp(lg / (2.0 * static_cast<double>(k))));
  }
  const int window = std::min(3, kmax);
  st.r_estimate = *std::max_element(st.roots.end() - window, st.roots.end());
  return st;
}

WeightSequence from_tuple_norms(const OperatorTuple& t, int kmax) {
  require(kmax >= 1, "bad-length", "norm scan needs kmax >= 1");
  const CpScan scan = cp_scan(t, Eigen::MatrixXcd::Identity(t.d, t.d), kmax);
  const int cap = scan.nilpotent_index ? *scan.nilpotent_index : kmax;
  std::vector<double> norms(static_cast<std::size_t>(cap) + 1), calib(norms.size());
  norms[0] = 1.0;
  calib[0] = scan.h[0];
  for (int k = 1; k <= cap; ++k) {
    calib[static_cast<std::size_t>(k)] = scan.h[static_cast<std::size_t>(k)];
    norms[static_cast<std::size_t>(k)] =
        (static_cast<double>(k) + 1.0) * std::sqrt(scan.h[static_cast<std::size_t>(k)]);
  }
  return WeightSequence::from_chain_levels(t.n, std::move(norms), scan.nilpotent_index.has_value(),
                                           std::move(calib));
}

ModelCertificate build_K_embedding(const OperatorTuple& t, const WeightSequence& w,
                                   const Eigen::MatrixXcd& Q, int N, const Limits& lim) {
  require(t.n == w.n(), "alphabet-mismatch", "tuple and weights disagree on the alphabet size");
  require(N >= 1, "bad-length", "embedding needs N >= 1");
  require(Q.rows() == t.d && Q.cols() == t.d, "shape-mismatch",
          "Q must match the tuple dimension");
  const double qscale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  require((Q - Q.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * qscale, "bad-q",
          "Q must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> qes(Q);
  require(qes.info() == Eigen::Success, "eigensolver-failed", "eigenvalue iteration did not converge");
  require(qes.eigenvalues().minCoeff() >= 1e-12, "not-positive-definite",
          "Q must be positive definite (eigenvalues >= 1e-12)");
  const Eigen::MatrixXcd qh = qes.operatorSqrt();

  const WordTable table = WordTable::build(t.n, N, lim);
  const std::size_t dim = table.words.size();
  require(dim * static_cast<std::size_t>(t.d) <= static_cast<std::size_t>(lim.max_dim),
          "resource-cap", "model space dimension exceeds the cap");

  // B[idx] = (1 / mu(word, g0)) Q^(1/2) T_word*, built by the tail recursion
  // T_{g_i delta}* = T_delta* T_i* so residual blocks cancel bitwise.
  std::vector<Eigen::MatrixXcd> prod(dim), blocks(dim);
  std::vector<double> muv(dim);
  prod[0] = Eigen::MatrixXcd::Identity(t.d, t.d);
  muv[0] = 1.0;
  blocks[0] = qh;
  for (std::size_t idx = 1; idx < dim; ++idx) {
    const int first = table.words[idx][0];
    prod[idx] = prod[static_cast<std::size_t>(table.tail[idx])] * t.T[static_cast<std::size_t>(first - 1)].adjoint();
    muv[idx] = mu_norm(w, table.words[idx]);
    blocks[idx] = muv[idx] == 0.0 ? Eigen::MatrixXcd::Zero(t.d, t.d)
                                  : Eigen::MatrixXcd((1.0 / muv[idx]) * (qh * prod[idx]));
  }

  ModelCertificate cert;
  cert.N = N;
  cert.K.setZero(static_cast<Eigen::Index>(dim) * t.d, t.d);
  for (std::size_t idx = 0; idx < dim; ++idx)
    cert.K.block(static_cast<Eigen::Index>(idx) * t.d, 0, t.d, t.d) = blocks[idx];

  const auto [lmin, lmax] = lambda_range_herm(cert.K.adjoint() * cert.K);
  cert.lambda_min = lmin;
  cert.lambda_max = lmax;
  cert.cb_bound = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();

  // Residual per generator: K T_i* minus the shifted block rows. The level-N
  // rows of the second term are cut off by the truncation, so the residual is
  // exactly the dropped top block (zero when the products already vanish).
  for (int gen = 1; gen <= t.n; ++gen) {
    Eigen::MatrixXcd r(cert.K.rows(), t.d);
    for (std::size_t idx = 0; idx < dim; ++idx)
      r.block(static_cast<Eigen::Index>(idx) * t.d, 0, t.d, t.d) =
          blocks[idx] * t.T[static_cast<std::size_t>(gen - 1)].adjoint();
    const SpMat wi = shift_matrix(table, w, gen, Side::left, /*adjoint=*/true);
    for (int col = 0; col < wi.outerSize(); ++col)
      for (SpMat::InnerIterator it(wi, col); it; ++it)
        r.block(static_cast<Eigen::Index>(it.row()) * t.d, 0, t.d, t.d) -=
            it.value() * blocks[static_cast<std::size_t>(it.col())];
    cert.residuals.push_back(std::sqrt(lambda_max_psd(r.adjoint() * r)));
  }

  // Level terms ||sum_{|a|=k} b_a T_a Q T_a*||. Tables carrying calibration
  // data were built as mu(a, g0) = (k+1) h_k^(1/2) from this very scan, so the
  // term factors as (1/(k+1)^2) * (||phi^k(Q)|| / h_k) with both norms read off
  // the same iteration - for Q = I the ratio is exactly 1.
  const std::vector<double>& calib = w.a_data();
  const bool calibrated = w.kind() == WeightKind::level_table && w.length_only() &&
                          calib.size() == static_cast<std::size_t>(w.cap()) + 1;
  if (calibrated) {
    const CpScan scan = cp_scan(t, Q, N);
    for (int k = 0; k <= N; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      if (k > w.cap() || calib[ks] == 0.0) {
        cert.level_term_norms.push_back(0.0);  // dead weights: the rows were dropped
        continue;
      }
      const double kd = static_cast<double>(k);
      cert.level_term_norms.push_back((1.0 / ((kd + 1.0) * (kd + 1.0))) * (scan.h[ks] / calib[ks]));
    }
  } else {
    for (int k = 0; k <= N; ++k) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.d, t.d);
      for (std::size_t idx = static_cast<std::size_t>(table.level_begin[static_cast<std::size_t>(k)]);
           idx < static_cast<std::size_t>(table.level_begin[static_cast<std::size_t>(k) + 1]); ++idx)
        m += blocks[idx].adjoint() * blocks[idx];
      cert.level_term_norms.push_back(lambda_max_psd(m));
    }
  }
  cert.convergence = term_verdict(cert.level_term_norms);
  return cert;
}

double model_bound(const OperatorTuple& t, ModelMode mode, int N, const Eigen::MatrixXcd* Q,
                   const Limits& lim) {
  require(N >= 1, "bad-length", "bound scan needs N >= 1");
  if (mode == ModelMode::rota) {
    require(Q != nullptr, "mode-mismatch", "the rota mode needs an explicit Q");
    const WeightSequence w = from_tuple_norms(t, N);
    return build_K_embedding(t, w, *Q, N, lim).cb_bound;
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(t.d, t.d);
  const CpScan scan = cp_scan(t, id, N);
  if (mode == ModelMode::main1) {
    require(!scan.nilpotent_index, "mode-mismatch",
            "tuple is nilpotent within the scan; use the nilpotent mode");
    const WeightSequence w = from_tuple_norms(t, N);
    const ModelCertificate cert = build_K_embedding(t, w, id, N, lim);
    const double bound = std::numbers::pi / std::sqrt(6.0);
    require(cert.cb_bound <= bound + 1e-9, "certificate-mismatch",
            "measured cb bound exceeds pi/sqrt(6)");
    return bound;
  }
  require(scan.nilpotent_index.has_value(), "mode-mismatch",
          "no nilpotency within the scan; use main1 or rota");
  const int m = *scan.nilpotent_index;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double kd = static_cast<double>(k);
    sum += 1.0 / ((kd + 1.0) * (kd + 1.0));
  }
  const double bound = std::sqrt(sum);
  const WeightSequence w = from_tuple_norms(t, m);
  const ModelCertificate cert = build_K_embedding(t, w, id, std::max(1, m - 1), lim);
  require(cert.cb_bound <= bound + 1e-12, "certificate-mismatch",
          "measured cb bound exceeds the finite-sum value");
  return bound;
}

FpWeights foias_pearcy_weights(int n, const std::vector<double>& a) {
  require(a.size() >= 2 && a[0] == 1.0, "bad-sequence",
          "norm sequence must start with a_0 = 1 and reach at least a_1");
  for (double v : a)
    require(v != 0.0, "nilpotent-input",
            "zero entry in the norm sequence: the nilpotent model applies");
  WeightSequence mu = interpolate_from_sequence(std::vector<double>(a.begin() + 1, a.end()), n);
  const int cap = static_cast<int>(a.size()) - 1;
  std::vector<double> kappa;
  kappa.reserve(static_cast<std::size_t>(cap));
  kappa.push_back(a[1]);  // k = 1: a_1^(1/2) * a_1^(1/2), taken exactly
  for (int k = 2; k <= cap; ++k) {
    int m = 0;
    while ((1 << (m + 1)) <= k) ++m;  // m = floor(log2 k)
    kappa.push_back(std::sqrt(a[1]) * std::pow(a[static_cast<std::size_t>(1 << m)],
                                               1.0 / static_cast<double>(1 << (m + 1))));
  }
  // sigma <= 1 is a theorem of the dyadic splitting; the clamp only trims
  // rounding of the quotients, and the residual certificate stays honest.
  std::vector<double> sigma(static_cast<std::size_t>(cap) + 1, 1.0);
  for (int k = 1; k <= cap; ++k)
    sigma[static_cast<std::size_t>(k)] =
        std::min(1.0, sigma[static_cast<std::size_t>(k - 1)] *
                          (mu.mu_level(k) / kappa[static_cast<std::size_t>(k - 1)]));
  bool quasi = false;
  if (cap >= 3) {
    // Trailing a_k^(1/k) strictly decreasing (beyond ulp wobble) is spectral
    // decay evidence; constant sequences like a = c^k stay unflagged.
    double r2 = std::pow(a[static_cast<std::size_t>(cap - 2)], 1.0 / (static_cast<double>(cap) - 2.0));
    double r1 = std::pow(a[static_cast<std::size_t>(cap - 1)], 1.0 / (static_cast<double>(cap) - 1.0));
    double r0 = std::pow(a[static_cast<std::size_t>(cap)], 1.0 / static_cast<double>(cap));
    quasi = r1 < r2 * (1.0 - 1e-12) && r0 < r1 * (1.0 - 1e-12);
  }
  return FpWeights{std::move(mu), a, std::move(kappa), std::move(sigma), quasi};
}

FpWeights foias_pearcy_weights(const OperatorTuple& t, int kmax) {
  require(kmax >= 1, "bad-length", "norm scan needs kmax >= 1");
  const CpScan scan = cp_scan(t, Eigen::MatrixXcd::Identity(t.d, t.d), kmax);
  require(!scan.nilpotent_index, "nilpotent-input",
          "tuple is nilpotent: the nilpotent model applies");
  std::vector<double> a(static_cast<std::size_t>(kmax) + 1);
  a[0] = 1.0;
  for (int k = 1; k <= kmax; ++k)
    a[static_cast<std::size_t>(k)] = std::exp(scan.logh[static_cast<std::size_t>(k)] * 0.25);
  // The fourth roots are submultiplicative in exact arithmetic; clamp away the
  // rounding of the measured norms so the interpolation validator accepts them.
  for (std::size_t k = 2; k < a.size(); ++k)
    for (std::size_t j = 1; j < k; ++j) a[k] = std::min(a[k], a[j] * a[k - j]);
  return foias_pearcy_weights(t.n, a);
}

FpCertificate foias_pearcy_certify(const FpWeights& fp, int N, const OperatorTuple* t,
                                   const Limits& lim) {
  const int cap = static_cast<int>(fp.a.size()) - 1;
  require(N >= 1 && N <= cap, "bad-length", "certificate depth must stay within the sequence cap");
  FpCertificate c;
  c.y_norm = *std::max_element(fp.sigma.begin(), fp.sigma.begin() + N + 1);
  c.min_sigma = *std::min_element(fp.sigma.begin(), fp.sigma.begin() + N + 1);
  c.max_residual = 0.0;
  for (int k = 1; k <= N; ++k)
    c.max_residual = std::max(
        c.max_residual, std::abs(fp.sigma[static_cast<std::size_t>(k - 1)] * fp.mu.mu_level(k) -
                                 fp.kappa[static_cast<std::size_t>(k - 1)] *
                                     fp.sigma[static_cast<std::size_t>(k)]));
  c.kappa_nonincreasing = true;
  for (int k = 2; k <= N; ++k)
    c.kappa_nonincreasing =
        c.kappa_nonincreasing && fp.kappa[static_cast<std::size_t>(k - 1)] <=
                                     fp.kappa[static_cast<std::size_t>(k - 2)] * (1.0 + 1e-12);
  c.kappa_dominates_roots = true;
  for (int k = 1; k <= N; ++k) {
    const double root = std::exp(std::log(fp.a[static_cast<std::size_t>(k)]) / static_cast<double>(k));
    c.kappa_dominates_roots =
        c.kappa_dominates_roots && fp.kappa[static_cast<std::size_t>(k - 1)] >= root * (1.0 - 1e-12);
  }
  if (t != nullptr) {
    require(t->n == fp.mu.n(), "alphabet-mismatch", "tuple and weights disagree on the alphabet size");
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(t->d, t->d);
    const ModelCertificate cert = build_K_embedding(*t, fp.mu, id, N, lim);
    const WordTable table = WordTable::build(t->n, N, lim);
    Eigen::MatrixXcd yk = cert.K;
    for (std::size_t idx = 0; idx < table.words.size(); ++idx)
      yk.block(static_cast<Eigen::Index>(idx) * t->d, 0, t->d, t->d) *=
          fp.sigma[static_cast<std::size_t>(table.level_of(static_cast<int>(idx)))];
    std::mt19937 rng(0x5eedu);
    std::normal_distribution<double> gauss(0.0, 1.0);
    c.battery_min_ratio = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXcd h(t->d);
      for (int i = 0; i < t->d; ++i) h(i) = std::complex<double>(gauss(rng), gauss(rng));
      const Eigen::VectorXcd img = yk * h;
      c.battery_min_ratio = std::min(c.battery_min_ratio, img.norm() / h.norm());
      // The unit-word block of Y K is Q^(1/2) itself, so pairing against
      // e_g0 (x) h recovers ||h||^2 when Q = I.
      const std::complex<double> pair = h.dot(img.head(t->d));
      c.battery_pairing_err =
          std::max(c.battery_pairing_err, std::abs(pair - std::complex<double>(h.squaredNorm(), 0.0)));
    }
  }
  return c;
}

}  // namespace fockshift
