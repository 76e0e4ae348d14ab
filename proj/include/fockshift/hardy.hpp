#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fockshift/fock.hpp"
#include "fockshift/freeword.hpp"
#include "fockshift/limits.hpp"
#include "fockshift/model.hpp"
#include "fockshift/weights.hpp"

namespace fockshift {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;  // lambda in C^n

// A noncommutative polynomial sum c_alpha Z_alpha (finitely supported).
struct Symbol {
  int n = 0;
  std::unordered_map<Word, Complex, WordHash> coeffs;
};

Symbol make_symbol(int n);
// Adds c to the coefficient of alpha, erasing entries that cancel to zero.
void symbol_add_term(Symbol& s, const Word& alpha, Complex c);
Complex symbol_coeff(const Symbol& s, const Word& alpha);
Symbol symbol_add(const Symbol& a, const Symbol& b);
Symbol symbol_scale(const Symbol& a, Complex c);
// Concatenation product: (ab)_gamma = sum_{gamma = alpha beta} a_alpha b_beta.
Symbol symbol_multiply(const Symbol& a, const Symbol& b);
int symbol_degree(const Symbol& s);  // -1 for the zero symbol

// (sum_{|alpha|=k} |c_alpha|^2)^(1/2k); the window maximum over the top
// supported levels estimates the limsup. Scaling c -> c(r .) scales the
// estimate by r.
double hol0_level_root(const Symbol& s, int k);
double hol0_estimate(const Symbol& s);

struct PointEvalResult {
  Point lambda;
  std::string verdict;            // member | non-member | undetermined
  std::string method;             // closed-form | finite-sum | ratio-window
  std::vector<double> level_sums; // c_k = sum_{|k'|=k} omega_k' |lambda^k'|^2
  std::vector<double> partial_sums;  // nondecreasing; ||z_lambda||^2 truncations
  int max_level = 0;
  double delta = 0.0;             // ratio threshold 1 - delta
};

// Membership of lambda in the point domain: level sums through the graded
// identity sum_{|alpha|=k} |lambda_alpha|^2 / mu(alpha,g0)^2 =
// sum_{|k'|=k} omega_k' |lambda^k'|^2, windowed ratio verdict, with the
// closed-form families (unit, harmonic_sq, inverse_square) decided exactly.
PointEvalResult point_membership(const WeightSequence& w, const Point& lambda, int max_level = 24,
                                 double delta = 0.05);

// z_lambda = sum_alpha conj(lambda_alpha)/mu(alpha,g0) e_alpha up to level N.
// Refuses non-member lambda unless truncation_override; the top level carries
// the truncation defect of the eigenvector identity W_i* z = conj(lambda_i) z.
CVec kernel_vector(const WeightSequence& w, const Point& lambda, int N,
                   bool truncation_override = false, const Limits& lim = default_limits());

// f(lambda) = sum c_alpha lambda_alpha over the support.
Complex evaluate_symbol(const Symbol& f, const Point& lambda);
// phi(W) vacuum vector: component c_alpha mu(alpha, g0) at e_alpha.
CVec symbol_to_fock(const Symbol& f, const WeightSequence& w, const WordTable& t);
// <f, z_lambda> in Fock coordinates, N inferred from the vector length.
Complex evaluate_fock(const CVec& f, const WeightSequence& w, const Point& lambda,
                      const Limits& lim = default_limits());

struct DomainReport {
  std::string verdict;  // member | divergent-evidence | undetermined
  std::vector<double> level_terms;  // || sum_{|a|=k} b_a T_a T_a* ||
  std::vector<double> partial_sums;
};

// Operator analogue of point membership: level terms via the CP-map recursion
// for length-only weights, word-wise products (resource-capped) otherwise.
DomainReport tuple_domain_membership(const WeightSequence& w, const OperatorTuple& t,
                                     int max_level, double delta = 0.05,
                                     const Limits& lim = default_limits());

enum class CesaroMode { fejer, exact_poly, hol0_series };

// fejer:      sum_{|a| <= N} (1 - |a|/(N+1)) c_a T_a
// exact_poly: sum over the full support
// hol0_series: level blocks in order, stopping when a block norm < tol;
//              rejects blocks that fail to decay (non-decaying-levels).
Eigen::MatrixXcd cesaro_evaluate(const Symbol& phi, const OperatorTuple& t, int N, CesaroMode mode,
                                 double tol = 1e-12);

// phi(W) materialised on the truncation (products of left shift matrices).
Eigen::MatrixXcd symbol_on_shifts(const Symbol& phi, const WeightSequence& w, const WordTable& t);

double operator_norm(const Eigen::MatrixXcd& m);   // largest singular value
double spectral_radius(const Eigen::MatrixXcd& m); // max |eigenvalue|

struct CalculusReport {
  double hom_residual = 0.0;       // max entry of phi*psi(T) - phi(T) psi(T)
  double r_phi_T = 0.0;            // eigenvalue radius of phi(T)
  double r_phi_W_truncated = 0.0;  // radius of the truncated phi(W): an estimate,
                                   // not a certified bound for the full shift
};

CalculusReport calculus_certificates(const Symbol& phi, const Symbol& psi, const OperatorTuple& t,
                                     const WeightSequence& w, int N,
                                     const Limits& lim = default_limits());

// phi = sum_i Z_i Phi_i with (Phi_i)_gamma = c_{g_i gamma}; needs c_{g0} = 0.
std::vector<Symbol> gleason_split(const Symbol& phi);

}  // namespace fockshift
