#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"
#include "fockshift/hardy.hpp"
#include "fockshift/limits.hpp"
#include "fockshift/model.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

// Multi-index lattice basis of the symmetric subspace: u^(k) = sqrt(omega_k)
// y^(k) orthonormal, with y^(k) the averaged class vector of Lambda_k. The
// lattice is the intrinsic representation (polynomial in the degree); Fock
// coordinates are produced only as a cross-check oracle.
struct SymmetricBasis {
  int n = 0;
  int D_total = 0;
  std::vector<MultiIndex> indices;      // graded order, lex within a degree
  std::vector<double> omega;            // omega_k per index
  std::vector<std::size_t> level_begin; // degree d spans [begin[d], begin[d+1])
  std::unordered_map<MultiIndex, std::size_t, WordHash> position;

  std::size_t index_of(const MultiIndex& k) const;
};

SymmetricBasis build_symmetric_basis(const WeightSequence& w, int D_total,
                                     const Limits& lim = default_limits());

// omega_k = sum over Lambda_k of 1/mu(alpha, g0)^2; closed multinomial form
// for length-only weights, word sums otherwise. Errors on dead chains.
double omega_value(const WeightSequence& w, const MultiIndex& k);

// y^(k) in Fock coordinates on the level-N truncation: coordinate
// 1/(omega_k mu(alpha,g0)) at each alpha in Lambda_k; ||y^(k)||^2 = 1/omega_k.
CVec y_vector(const WeightSequence& w, const MultiIndex& k, int N,
              const Limits& lim = default_limits());

// B_i u^(k) = sqrt(omega_k/omega_{k+e_i}) u^(k+e_i), compressed to the cap
// (top-degree columns map to 0); one nonzero per interior column.
SpMat commuting_shift_matrix(const SymmetricBasis& b, int gen);

// Max residual between <W_i y^(k), y^(k')> computed in Fock coordinates and
// the lattice matrix entry rescaled to the y-normalisation. Needs N >=
// D_total + 1 so the Fock side sees the full image.
double compression_check(const WeightSequence& w, int gen, int D_total, int N,
                         const Limits& lim = default_limits());

struct H2Kernel {
  Complex value{0.0, 0.0};
  std::vector<Complex> level_terms;  // sum_{|k|=d} omega_k zeta^k conj(lambda)^k
};

// kappa(zeta, lambda) = sum_k omega_k zeta^k conj(lambda)^k = <z_lambda,
// z_zeta>, summed by total degree. Refuses non-member endpoints.
H2Kernel h2_kernel(const WeightSequence& w, const Point& zeta, const Point& lambda, int max_degree,
                   const Limits& lim = default_limits());

struct CommutativeCertificate {
  int D_total = 0;
  Eigen::MatrixXcd K;                   // (count*d) x d, block sqrt(omega_k) Q^{1/2} (T^k)^*
  std::vector<double> residuals;        // ||K T_i^* - (B_i^* (x) I) K|| per generator
  double lambda_min = 0.0;              // spectrum box of K^* K
  double lambda_max = 0.0;
  double cb_bound = 0.0;                // sqrt(lambda_max/lambda_min)
  std::vector<double> level_term_norms; // ||sum_{|k|=d} omega_k T^k Q T^k*||
  std::string convergence;              // finite | convergent-evidence | undetermined
};

// Commutative embedding on the lattice: K h = sum_k u^(k) (x) sqrt(omega_k)
// Q^{1/2} (T^k)^* h with the intertwining certified against the lattice
// shifts. Mathematically defect-free for nilpotent tuples once D_total
// reaches the nilpotency index minus one.
CommutativeCertificate commutative_model(const OperatorTuple& t, const WeightSequence& w,
                                         const Eigen::MatrixXcd* Q, int D_total,
                                         const Limits& lim = default_limits());

// Multi-index polynomial calculus sum_k c_k T^k for commuting tuples, with
// the same three summation modes as the word-side calculus.
Eigen::MatrixXcd commutative_calculus(const std::unordered_map<MultiIndex, Complex, WordHash>& coeffs,
                                      const OperatorTuple& t, int N, CesaroMode mode,
                                      double tol = 1e-12);

}  // namespace fockshift
