#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gpbog/common.hpp"
#include "gpbog/potential.hpp"

namespace gpbog {

/// Occupation-number basis of the truncated excitation space F_+^{<= N} over
/// a finite negation-closed mode set P subset of 2 pi Z^3 \ {0}. States are
/// occupation vectors (n_1, ..., n_m) with sum n_i <= N, ordered
/// lexicographically; dimension = sum_{k<=N} C(k+m-1, m-1).
class FockBasis {
 public:
  FockBasis(std::vector<Int3> modes, int cap, std::size_t dim_guard = 2000000);

  std::size_t dim() const { return states_.size() / modes_.size(); }
  int nmodes() const { return static_cast<int>(modes_.size()); }
  int cap() const { return cap_; }
  const std::vector<Int3>& modes() const { return modes_; }

  int mode_index(const Int3& p) const;  // -1 if absent
  int neg_index(int mode) const { return neg_[mode]; }

  const unsigned char* occ(std::size_t state) const {
    return states_.data() + state * modes_.size();
  }
  int total_occupation(std::size_t state) const;
  /// index of an occupation vector; throws if it is not a basis state
  std::size_t index_of(const std::vector<unsigned char>& occ) const;

  /// stars-and-bars dimension count (oracle-friendly, overflow-checked)
  static std::size_t dimension(int nmodes, int cap);

 private:
  std::vector<Int3> modes_;
  int cap_ = 0;
  std::vector<unsigned char> states_;            // dim x nmodes, row-major
  std::map<std::vector<unsigned char>, std::size_t> index_;
  std::vector<int> neg_;
};

enum class Ladder { A, Adag, B, Bdag };

/// Real sparse operator on a FockBasis.
struct SparseOperator {
  Eigen::SparseMatrix<double> mat;
  const FockBasis* basis = nullptr;
  bool hermitian = false;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return mat * v; }
};

/// Standard or modified ladder operator for mode p.
///   a_p / a*_p: usual sqrt(n) factors.
///   b_p = sqrt((N - N_+)/N) a_p (multiplier after annihilation),
///   b*_p = a*_p sqrt((N - N_+)/N) (multiplier before creation).
SparseOperator ladder(const FockBasis& basis, const Int3& p, Ladder kind);

/// N_+ (diagonal), and the three components of the total momentum operator
/// sum_p p a*_p a_p (diagonal, in units of 2 pi).
SparseOperator number_op(const FockBasis& basis);
std::array<SparseOperator, 3> momentum_op(const FockBasis& basis);

/// B(eta) = (1/2) sum_p eta_p (b*_p b*_{-p} - b_p b_{-p}), anti-hermitian by
/// construction. eta must be symmetric under p -> -p.
SparseOperator build_B_eta(const FockBasis& basis, const std::map<long long, double>& eta_by_n2);

/// Cubic generator
///   A = (1/sqrt N) sum_{r in P_H, v in P_L} eta_r [ sigma_v b*_{r+v} b*_{-r} b*_{-v}
///       + gamma_v b*_{r+v} b*_{-r} b_v - h.c. ]
/// with r + v != 0 and all touched modes in P; terms leaving P are dropped
/// and counted.
struct CubicResult {
  SparseOperator A;        // full anti-hermitian generator
  SparseOperator A_sigma;  // the sigma piece (not anti-symmetrized)
  SparseOperator A_gamma;  // the gamma piece (not anti-symmetrized)
  long dropped = 0;
};
CubicResult build_cubic_A(const FockBasis& basis, const std::map<long long, double>& eta_by_n2,
                          const std::vector<Int3>& P_H, const std::vector<Int3>& P_L);

/// Excitation Hamiltonian L_N restricted to the basis modes; terms touching
/// modes outside P are dropped and counted. Vacuum expectation is exactly
/// (N-1) V̂(0) / 2.
struct LNResult {
  SparseOperator L;                    // full L_N
  SparseOperator pieces[4];            // L^(0), L^(2), L^(3), L^(4)
  long dropped_cubic = 0;
  long dropped_quartic = 0;
};
LNResult build_L_N(const FockBasis& basis, const RadialPotential& pot, int N);

/// w = e^{tG} v for anti-symmetric (or general) sparse G: dense scaling and
/// squaring below dimension 400, Arnoldi/Krylov time stepping above.
Eigen::VectorXd expm_apply(const Eigen::SparseMatrix<double>& G, const Eigen::VectorXd& v,
                           double t = 1.0, double tol = 1e-10);

/// Action v -> e^{-G} H e^{G} v.
class ConjugatedAction {
 public:
  ConjugatedAction(const SparseOperator& H, const SparseOperator& G, double tol = 1e-10);
  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const;
  std::size_t dim() const { return static_cast<std::size_t>(H_->mat.rows()); }

 private:
  const SparseOperator* H_;
  const SparseOperator* G_;
  double tol_;
  bool dense_ = false;
  Eigen::MatrixXd expG_, expmG_;
};

/// || (e^{-B} b_p e^{B} - gamma_p b_p - sigma_p b*_{-p}) v || for each test v.
std::vector<double> d_p_residual(const FockBasis& basis, const SparseOperator& B,
                                 const Int3& p, double eta_p,
                                 const std::vector<Eigen::VectorXd>& vs, double tol = 1e-10);

/// Lowest k eigenvalues (ascending) and the ground vector of a hermitian
/// action, Lanczos with full reorthogonalization, relative residual 1e-9.
struct LanczosResult {
  Eigen::VectorXd values;
  Eigen::VectorXd ground;
};
LanczosResult lanczos_ground(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                             std::size_t dim, int k, int max_iter = 600, double tol = 1e-9,
                             unsigned seed = 1234);

/// Dense check of the standard (non-particle-conserving) two-mode Bogoliubov
/// model H = F (a1*a1 + a2*a2) + G (a1*a2* + a1 a2) on the occupation cutoff
/// space n1, n2 <= n_max, against the closed form
/// (sqrt(F^2-G^2) - F) + sqrt(F^2-G^2) (n1 + n2).
struct StandardBogCheck {
  Eigen::VectorXd eigenvalues;   // lowest computed
  double shift_exact = 0.0;      // sqrt(F^2-G^2) - F
  double gap_exact = 0.0;        // sqrt(F^2-G^2)
  double max_deviation = 0.0;    // over the compared low eigenvalues
  bool cutoff_flag = false;      // lowest moved > 1e-8 when n_max doubles
};
StandardBogCheck standard_bogoliubov_check(double F, double G, int n_max, int compare = 6);

/// Matrix-market coordinate export (deterministic entry order).
void write_matrix_market(const SparseOperator& op, const std::string& path);

}  // namespace gpbog
