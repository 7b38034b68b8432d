#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "gpbog/common.hpp"
#include "gpbog/potential.hpp"

namespace gpbog {

/// Radial summand over the integer lattice: value as a function of |n|^2.
using RadialSummand = std::function<double(long long)>;

/// Result of a lattice sum with its convergence trace.
/// method: "square-partial" (raw cube partial sums), "averaged" (cube partial
/// sums + trailing-window arithmetic means), "shell+tail" (shell-ordered
/// absolutely convergent sum with envelope tail estimate).
struct LatticeSumResult {
  double value = 0.0;
  int cutoff = 0;
  std::string method;
  double error_estimate = 0.0;
  Eigen::VectorXd trace;           // partial value after cube/shell M = 1..cutoff
  Eigen::VectorXd averaged;        // first smoothing pass
  Eigen::VectorXd twice_averaged;  // second smoothing pass
  int window = 1;                  // trailing-window width used
};

/// Exact sum of `f` over the cube |n_i| <= M (origin excluded), lexicographic
/// order, compensated accumulation. Deterministic bit-for-bit.
double square_partial_sum(const std::function<double(const Int3&)>& f, int M);

/// Cube partial sums S_M, M = 1..Mmax, of a radial summand, computed with a
/// single octahedrally-reduced pass. trace[M-1] = sum over the cube M.
Eigen::VectorXd cube_partial_trace(const RadialSummand& f, int Mmax);

/// Trailing arithmetic mean of width w (order-preserving smoothing).
Eigen::VectorXd trailing_mean(const Eigen::VectorXd& x, int w);

/// Assemble a LatticeSumResult from a cube trace: three trailing-mean passes
/// of width `window`; the value is the last smoothed entry, the error estimate
/// the largest recent increment of the smoothed sequence.
LatticeSumResult averaged_square_sum(const RadialSummand& f, int Mmax, int window,
                                     const std::string& method_tag = "averaged");

/// Shell-ordered sum of an absolutely convergent radial summand over
/// |n| <= Mball (ball, ascending |n|^2), with a least-squares 1/|p|^4-envelope
/// tail estimate fitted on the outer 20% of shells.
LatticeSumResult shell_sum(const RadialSummand& f, int Mball);

/// Conditionally convergent constant e_Lambda: S = lim square partial sums of
/// sum cos(|n|)/n^2 over Z^3 \ {0}; both printed normalization candidates are
/// returned and adjudicated against the I_ell and Born routes.
struct ELambdaResult {
  LatticeSumResult S;       // the cos sum itself
  double candidate_1 = 0.0; // 2 - S
  double candidate_4 = 0.0; // 2 - 4S
  double adjudicated = 0.0; // set by adjudicate_e_lambda
  std::string winner;       // "2-4S" or "2-S"
  double born_route = 0.0;  // |Born limit| used in adjudication
  double iell_route = 0.0;  // 6 pi I_ell
};
ELambdaResult e_lambda(int M_max);

/// Picks the candidate closest to the Born-route magnitude, cross-checks the
/// I_ell route, and fills the adjudication fields.
void adjudicate_e_lambda(ELambdaResult& e, double born_value, double iell_value);

/// I_ell = 4 pi ell^2 / 3 - (8 pi / 3) lim sum_{p in 2 pi Z^3 \ 0} cos(ell|p|)/p^2
/// (square partial sums, trailing-window averaged), plus the closed-identity
/// cross-check  -(2/ell^3) sum chi_hat_ell(p)/p^2 = I_ell - 1/ell - 4 pi ell^2/15.
struct IEllResult {
  LatticeSumResult sum;      // the cos(ell |p|)/p^2 trace (over 2 pi Z^3)
  double I_ell = 0.0;
  double chi_route_lhs = 0.0;      // -(2/ell^3) sum chi_hat/p^2 (averaged)
  double identity_residual = 0.0;  // |lhs - (I_ell - 1/ell - 4 pi ell^2/15)|
};
IEllResult i_ell(double ell, int M_max);

/// Closed-form radial Fourier transforms of the ball indicator and weighted
/// variants; series branches near p = 0.
struct ChiHats {
  double chi = 0.0;       // chi_hat_ell(p)
  double chi_r2 = 0.0;    // (chi_ell |.|^2)^hat (p)
  double chi_over_r = 0.0;// (chi_ell / |.|)^hat (p)
};
ChiHats chi_hats(double ell, double p);

/// Born chain sums for the finite-volume scattering length:
///   8 pi a_N = V̂(0) + sum_k (-1)^k (2N)^{-k} [chain_k over the cube |n_i| <= M].
struct BornResult {
  std::vector<double> partial;     // cumulative 8 pi a_N^{(k)}, k = 0..k_max
  std::vector<double> term;        // individual order-k terms
  std::vector<double> tail;        // per-order envelope tail estimates
  bool grid_too_small = false;
  bool weak_warning = false;       // first Born correction > 30% of V̂(0)
};
BornResult born_a_N(const RadialPotential& pot, int N, int k_max, int M);

/// Finite-N lattice defect of the second Born term, computed as the matched
/// difference (lattice sum - continuum integral) via per-cell Gauss
/// quadrature; B_N = 4 pi (N-1) (a_N - a0)|_{2nd order} / (V̂(0)/8pi)^2
/// Richardson-extrapolates to the adjudicated e_Lambda.
struct BornLimitResult {
  std::vector<int> Ns;
  std::vector<double> B_N;         // signed values, positive when a_N > a0
  double extrapolated = 0.0;       // Richardson limit of B_N (signed)
  double abs_limit = 0.0;          // |extrapolated|, the adjudication value
  double richardson_spread = 0.0;  // |last two Richardson pairs differ|
  int sign = 0;                    // sign of (a_N - a0) at second Born order
  bool weak_warning = false;
};
BornLimitResult born_limit(const RadialPotential& pot, const std::vector<int>& Ns,
                           double kappa_max);

}  // namespace gpbog
