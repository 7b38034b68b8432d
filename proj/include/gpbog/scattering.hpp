#pragma once

#include <Eigen/Core>
#include <map>
#include <string>

#include "gpbog/common.hpp"
#include "gpbog/potential.hpp"

namespace gpbog {

/// Zero-energy scattering length of V on R^3, from -m'' + (1/2)Vm = 0 with
/// m(0)=0, m'(0)=1; a0 is read off the exterior asymptote m = c(r - a0) and
/// cross-checked against (1/8pi) * int V f. The two routes must agree to
/// rel. 1e-8 or a ConvergenceError is thrown.
struct ScatteringLengthResult {
  double a0 = 0.0;             // asymptote route
  double a0_integral = 0.0;    // (1/8pi) int V f route
  double route_mismatch = 0.0; // relative difference
};
ScatteringLengthResult scattering_length(const RadialPotential& pot);

/// Ground state of the radial Neumann problem [-Delta + V/2] f = lambda f on
/// the ball |x| <= N*ell, normalized with f(N*ell) = 1. The grid is blockwise
/// uniform with block edges at the potential's breakpoints, so the integrator
/// never steps across a kink of V.
class ScatteringSolution {
 public:
  Eigen::VectorXd r;   // radial grid, r[0] = 0, r.tail = N*ell
  Eigen::VectorXd m;   // m(r) = r f(r), normalized so m(L) = L
  Eigen::VectorXd mp;  // m'(r)
  double lambda = 0.0;
  double a0 = 0.0;     // infinite-volume scattering length of V
  int N = 0;
  double ell = 0.0;
  bool grid_coarse_flag = false;   // Richardson halving moved lambda > 1e-8 rel
  double richardson_delta = 0.0;

  double L() const { return static_cast<double>(N) * ell; }
  double f(Eigen::Index i) const { return i == 0 ? mp[0] : m[i] / r[i]; }
  double w(Eigen::Index i) const { return 1.0 - f(i); }

  /// 4*pi * int_0^L r^2 g(r) u(r) dr by composite Simpson per uniform block,
  /// u one of the stored grid functions. Used by the transform routines.
  double radial_integral(const Eigen::VectorXd& integrand) const;

  /// Fourier transform of V*f (compact support): 4pi int_0^R r^2 V f sinc(kr) dr.
  /// Equals the lattice convolution (V̂(./N) * f̂_{l,N})_p at k = |p|/N.
  double vf_hat(double k) const;
  /// Same for V*w and V*w^2.
  double vw_hat(double k) const;
  double vw2_hat0() const;
  /// 4pi int r^2 (w')^2 dr  ( = (1/N) sum_p p^2 eta_p^2, exactly )
  double grad_w_sq() const;
  /// 4pi int r^2 w^2 dr over [0, L]
  double w_sq_integral() const;

  const RadialPotential& potential() const { return *pot_; }

 private:
  friend ScatteringSolution solve_neumann(const RadialPotential&, int, double, int);
  const RadialPotential* pot_ = nullptr;
  std::vector<Eigen::Index> block_edges_;  // indices of block boundaries in r
};

ScatteringSolution solve_neumann(const RadialPotential& pot, int N, double ell,
                                 int grid_size);

/// Independent lambda route: symmetric finite-difference generalized
/// eigenproblem on the same grid resolution, smallest eigenvalue by inverse
/// iteration (with deflation of the trivial mode when V = 0).
double neumann_lambda_fd(const RadialPotential& pot, int N, double ell, int grid_size);

/// int_{R^3} w_l = 4pi int_0^L r^2 w dr.
double integral_w(const ScatteringSolution& sol);

/// Radial transform of w_l: (4pi/k) int_0^L r w sin(kr) dr, k -> 0 limit = int w.
double w_hat(const ScatteringSolution& sol, double k);

/// eta_p = -(1/N^2) * w_hat(|p|/N) on the cube |n_i| <= M (p = 2 pi n), cached
/// by the squared integer norm; eta0 kept separately.
class EtaTable {
 public:
  int M = 0;
  int N = 0;
  double ell = 0.0;
  double eta0 = 0.0;

  double eta(const Int3& n) const;           // throws outside the cube
  double eta_norm2(long long n2) const;      // by squared integer norm
  bool in_cube(const Int3& n) const;

  double l2norm_sq_table() const;   // sum of eta_p^2 over the cube (p != 0)
  double l2norm_sq_exact() const;   // position-space value (no cutoff)
  double l2norm_tail() const;       // envelope estimate beyond the cube
  double envelope_C() const;        // fitted C with |eta_p| <= C / p^2

  const std::map<long long, double>& radial_values() const { return vals_; }
  const ScatteringSolution& solution() const { return *sol_; }

 private:
  friend EtaTable eta_coefficients(const ScatteringSolution&, int);
  const ScatteringSolution* sol_ = nullptr;
  std::map<long long, double> vals_;
  double l2_exact_ = 0.0;
  double env_C_ = 0.0;
};

EtaTable eta_coefficients(const ScatteringSolution& sol, int M);

/// Residual of the lattice scattering relation at p = 2 pi n:
///   p^2 eta_p + V̂(p/N)/2 + (1/2N) sum_q V̂((p-q)/N) eta_q
///     = N^3 lambda_l [ chi_hat_l(p) + (1/N) sum_q chi_hat_l(p-q) eta_q ].
/// Convolutions are truncated at the table cube; the reported tails are the
/// exact remainders obtained from the position-space forms.
struct EtaRelationReport {
  double lhs = 0.0, rhs = 0.0;
  double residual = 0.0;       // |lhs-rhs| / (|lhs|+|rhs|+eps)
  double lhs_tail = 0.0, rhs_tail = 0.0;
  bool outside_core = false;   // |n| > M/4: truncation not trusted here
};
EtaRelationReport eta_relation_residual(const ScatteringSolution& sol,
                                        const EtaTable& table, const Int3& n);

}  // namespace gpbog
