#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gpbog/common.hpp"
#include "gpbog/scattering.hpp"

namespace gpbog {

/// (sigma, gamma) = (sinh eta, cosh eta); gamma^2 - sigma^2 = 1.
std::pair<double, double> hyperbolic_pair(double eta);

/// Per-momentum quadratic coefficients. All entries are radial in |p| (the
/// lattice convolution (V̂(./N) * f̂_{l,N})_p reduces to the radial transform
/// of V f_l), so values are stored per squared integer norm.
struct QuadCoeffs {
  double A = 0.0;  // F_p (JN flavor) or Phi_p (GN flavor)
  double B = 0.0;  // G_p or Gamma_p
  double W = 0.0;  // (V̂(./N) * f̂_{l,N})_p
};

struct QuadraticForm {
  enum class Flavor { GN, JN };
  Flavor flavor = Flavor::JN;
  int M = 0;  // cube cutoff of the momentum set
  int N = 0;
  std::map<long long, QuadCoeffs> radial;  // by |n|^2
  double conv_tail_probe = 0.0;  // |table-truncated conv - exact| at a probe p
  bool cutoff_flag = false;      // probe tail exceeds 1% of the smallest |A|

  const QuadCoeffs& at_norm2(long long n2) const;
};

QuadraticForm quad_coeffs_J(const EtaTable& table, const RadialPotential& pot, int N);
QuadraticForm quad_coeffs_G(const EtaTable& table, const RadialPotential& pot, int N);

/// tau_p = (1/4) log((1 - G/F)/(1 + G/F)), eps_p = sqrt(F^2 - G^2), and the
/// scalar shift (1/2) sum_p (eps_p - F_p) over the form's cube. Throws if
/// |G_p| >= F_p anywhere (Bogoliubov-unstable input), naming the offender.
struct DiagonalizedForm {
  std::map<long long, double> tau, eps;
  double shift = 0.0;
  double tau_at(long long n2) const { return tau.at(n2); }
  double eps_at(long long n2) const { return eps.at(n2); }
};
DiagonalizedForm diagonalize(const QuadraticForm& form);

/// eps(p) = sqrt(|p|^4 + 16 pi a0 p^2), the N -> infinity dispersion.
double dispersion_limit(double a0, double pnorm);

/// Shell-ordered regularized sums over 2 pi Z^3 \ {0} up to |p| <= Lambda.
struct ShellSumResult {
  double value = 0.0;
  double tail = 0.0;     // integral-comparison estimate beyond Lambda
  double Lambda = 0.0;
};

/// E_Bog = (1/2) sum [ sqrt(p^4 + 16 pi a0 p^2) - p^2 - 8 pi a0 + (8 pi a0)^2/(2p^2) ].
ShellSumResult ebog(double a0, double Lambda);

/// Same sum with (V̂(./N) * f̂_{l,N})_p in place of 8 pi a0.
ShellSumResult ebog_N(const ScatteringSolution& sol, double Lambda);

/// Theorem energy: 4 pi (N-1) a0 + e_Lambda a0^2 + E_Bog.
struct EnergyResult {
  double E_N = 0.0;
  double condensate_term = 0.0;
  double e_lambda_term = 0.0;
  double ebog_value = 0.0;
  double ebog_tail = 0.0;
  std::string error_order = "O(N^-1/4)";  // theorem's caveat, metadata only
};
EnergyResult ground_state_energy(int N, double a0, double e_lambda_value, double Lambda);

/// Scalar constants C_{G_N} and C_{J_N}, assembled term by term. Lattice
/// eta-sums are evaluated through their exact position-space identities;
/// the sinh-vs-eta corrections are small absolutely convergent shell sums.
struct ConstantsResult {
  double C_GN = 0.0;
  double C_JN = 0.0;
  std::map<std::string, double> gn_terms, jn_terms;
  double tail_bound = 0.0;  // neglected delta-delta double sum bound
};
ConstantsResult constants(const EtaTable& table, const RadialPotential& pot, int N);

/// Quadratic-shift route to the ground state energy:
/// (1/2) sum_{|p| <= Lambda} [ -F_p + sqrt(F_p^2 - G_p^2) ] with radial F, G.
ShellSumResult diag_shift(const ScatteringSolution& sol, double Lambda);

/// N-independent depletion sum
/// sum_p (p^2 + 8 pi a0 - eps(p)) / (2 eps(p));  the 1/N prefactor is the
/// caller's. Appendix-A route: sum_p [sigma_p^2 + (sigma^2+gamma^2) sinh^2 tau
/// + 2 sigma gamma sinh tau cosh tau] with tau from the J-flavor F, G.
ShellSumResult depletion_sum(double a0, double Lambda);
ShellSumResult depletion_bog_route(const ScatteringSolution& sol, double Lambda);

/// One eigenvalue line of the diagonal quadratic operator sum eps_p a*_p a_p.
struct SpectrumLine {
  double nu = 0.0;
  long long multiplicity = 0;
  std::vector<std::pair<int, int>> occupation;  // (mode index, n_p), representative
};

/// All eigenvalues nu <= zeta with multiplicities, ascending, vacuum first.
/// DFS over occupation vectors with pruning on sorted eps; two nu values are
/// the same line iff |nu - nu'| <= 1e-9 (1 + |nu|). Throws ConvergenceError
/// with a count estimate if more than max_lines occupation vectors appear.
std::vector<SpectrumLine> enumerate_spectrum(const std::vector<double>& eps, double zeta,
                                             std::size_t max_lines = 2000000);

}  // namespace gpbog
