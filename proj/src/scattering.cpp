#include "gpbog/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "gpbog/lattice.hpp"
#include "gpbog/quadrature.hpp"

namespace gpbog {

namespace {

// Blockwise uniform radial grid honoring the potential's breakpoints, so the
// integrator never steps across a kink of V.
struct RadialGrid {
  Eigen::VectorXd r;
  std::vector<Eigen::Index> edges;  // indices of block boundaries, first = 0
};

RadialGrid build_grid(const RadialPotential& pot, double L, int grid_size) {
  std::vector<double> e{0.0};
  for (double b : pot.breakpoints())
    if (b > 0.0 && b < L) e.push_back(b);
  e.push_back(L);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());

  RadialGrid g;
  std::vector<int> steps(e.size() - 1);
  int total = 0;
  for (std::size_t b = 0; b + 1 < e.size(); ++b) {
    steps[b] = std::max(64, static_cast<int>(std::lround(grid_size * (e[b + 1] - e[b]) / L)));
    total += steps[b];
  }
  g.r.resize(total + 1);
  g.edges.push_back(0);
  Eigen::Index at = 0;
  g.r[0] = 0.0;
  for (std::size_t b = 0; b + 1 < e.size(); ++b) {
    double h = (e[b + 1] - e[b]) / steps[b];
    for (int i = 1; i <= steps[b]; ++i) g.r[at + i] = e[b] + h * i;
    at += steps[b];
    g.r[at] = e[b + 1];  // exact edge
    g.edges.push_back(at);
  }
  return g;
}

// RK4 for m'' = (V/2 - lambda) m from m(0)=0, m'(0)=1 over the blockwise grid.
void integrate_radial(const RadialPotential& pot, const RadialGrid& g, double lambda,
                      Eigen::VectorXd* m_out, Eigen::VectorXd* mp_out) {
  Eigen::Index n = g.r.size();
  Eigen::VectorXd m(n), u(n);
  m[0] = 0.0;
  u[0] = 1.0;
  auto rhs = [&](double r, double mm) { return (0.5 * pot(r) - lambda) * mm; };
  for (std::size_t b = 0; b + 1 < g.edges.size(); ++b) {
    Eigen::Index i0 = g.edges[b], i1 = g.edges[b + 1];
    double h = g.r[i0 + 1] - g.r[i0];
    for (Eigen::Index i = i0; i < i1; ++i) {
      double r0 = g.r[i], mm = m[i], uu = u[i];
      double k1m = uu, k1u = rhs(r0, mm);
      double k2m = uu + 0.5 * h * k1u, k2u = rhs(r0 + 0.5 * h, mm + 0.5 * h * k1m);
      double k3m = uu + 0.5 * h * k2u, k3u = rhs(r0 + 0.5 * h, mm + 0.5 * h * k2m);
      double k4m = uu + h * k3u, k4u = rhs(r0 + h, mm + h * k3m);
      m[i + 1] = mm + h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
      u[i + 1] = uu + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    }
  }
  if (m_out) *m_out = std::move(m);
  if (mp_out) *mp_out = std::move(u);
}

double simpson_blocks(const RadialGrid& g, const Eigen::VectorXd& y) {
  KahanSum acc;
  for (std::size_t b = 0; b + 1 < g.edges.size(); ++b) {
    Eigen::Index i0 = g.edges[b], i1 = g.edges[b + 1];
    double h = g.r[i0 + 1] - g.r[i0];
    std::vector<double> slice(y.data() + i0, y.data() + i1 + 1);
    acc.add(simpson_uniform(slice, h));
  }
  return acc.value();
}

}  // namespace

ScatteringLengthResult scattering_length(const RadialPotential& pot) {
  double R = pot.support_radius();
  auto once = [&](int steps) {
    RadialGrid g = build_grid(pot, R, steps);
    Eigen::VectorXd m, u;
    integrate_radial(pot, g, 0.0, &m, &u);
    Eigen::Index last = g.r.size() - 1;
    double c = u[last];
    double a0 = R - m[last] / c;
    Eigen::VectorXd y(g.r.size());
    for (Eigen::Index i = 0; i < g.r.size(); ++i) y[i] = g.r[i] * pot(g.r[i]) * m[i] / c;
    double a0i = 0.5 * simpson_blocks(g, y);
    return std::pair<double, double>{a0, a0i};
  };
  auto [a1, i1] = once(8192);
  auto [a2, i2] = once(16384);
  ScatteringLengthResult res;
  res.a0 = a2;
  res.a0_integral = i2;
  double scale = std::max({std::abs(a2), std::abs(i2), 1e-12});
  res.route_mismatch = std::abs(a2 - i2) / scale;
  if (std::abs(a1 - a2) / scale > 1e-9)
    throw ConvergenceError("scattering::scattering_length: grid refinement unstable");
  if (res.route_mismatch > 1e-8)
    throw ConvergenceError("scattering::scattering_length: asymptote and integral routes disagree");
  return res;
}

namespace {

// Neumann mismatch g(lambda) = L m'(L) - m(L); the eigenvalue is its root.
double neumann_mismatch(const RadialPotential& pot, const RadialGrid& g, double lambda) {
  Eigen::VectorXd m, u;
  integrate_radial(pot, g, lambda, &m, &u);
  Eigen::Index last = g.r.size() - 1;
  double L = g.r[last];
  return L * u[last] - m[last];
}

double smallest_positive_lambda(const RadialPotential& pot, const RadialGrid& g, double L) {
  // Geometric scan of lambda * L^2 over [1e-9, 21]; 21 covers the free-case
  // root (x1/L)^2 with tan x = x, x1 ~ 4.4934. The ground state of V >= 0
  // sits far below, so the first sign change is the one we want.
  const int kScan = 700;
  double lo = 1e-9 / (L * L), hi = 21.0 / (L * L);
  double ratio = std::pow(hi / lo, 1.0 / (kScan - 1));
  double prev_l = lo, prev_g = neumann_mismatch(pot, g, lo);
  double bl = 0, bh = 0;
  bool found = false;
  double lam = lo;
  for (int i = 1; i < kScan; ++i) {
    lam *= ratio;
    double gv = neumann_mismatch(pot, g, lam);
    if (prev_g == 0.0) return prev_l;
    if (gv == 0.0) return lam;
    if ((prev_g < 0) != (gv < 0)) {
      bl = prev_l;
      bh = lam;
      found = true;
      break;
    }
    prev_l = lam;
    prev_g = gv;
  }
  if (!found)
    throw ConvergenceError("scattering::solve_neumann: no bisection bracket for lambda");
  double gl = neumann_mismatch(pot, g, bl);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (bl + bh);
    double gm = neumann_mismatch(pot, g, mid);
    if ((gl < 0) == (gm < 0)) {
      bl = mid;
      gl = gm;
    } else {
      bh = mid;
    }
    if ((bh - bl) <= 1e-14 * bh) break;
  }
  return 0.5 * (bl + bh);
}

}  // namespace

ScatteringSolution solve_neumann(const RadialPotential& pot, int N, double ell,
                                 int grid_size) {
  if (N < 2) throw ValidationError("scattering::solve_neumann: N must be >= 2");
  if (!(ell > 0.0 && ell < 0.5))
    throw ValidationError("scattering::solve_neumann: need 0 < ell < 1/2");
  if (grid_size < 1000)
    throw ValidationError("scattering::solve_neumann: grid_size must be >= 1000");
  double L = static_cast<double>(N) * ell;
  if (pot.support_radius() >= L)
    throw ValidationError("scattering::solve_neumann: potential support exceeds the ball");

  RadialGrid g = build_grid(pot, L, grid_size);
  double lam = smallest_positive_lambda(pot, g, L);

  RadialGrid gh = build_grid(pot, L, grid_size / 2);
  double lam_h = smallest_positive_lambda(pot, gh, L);

  ScatteringSolution sol;
  sol.pot_ = &pot;
  sol.N = N;
  sol.ell = ell;
  sol.lambda = lam;
  sol.richardson_delta = std::abs(lam - lam_h) / std::abs(lam);
  sol.grid_coarse_flag = sol.richardson_delta > 1e-8;
  sol.r = g.r;
  sol.block_edges_ = g.edges;
  integrate_radial(pot, g, lam, &sol.m, &sol.mp);
  double scale = L / sol.m[sol.m.size() - 1];
  sol.m *= scale;
  sol.mp *= scale;
  sol.a0 = pot.is_zero() ? 0.0 : scattering_length(pot).a0;
  return sol;
}

double neumann_lambda_fd(const RadialPotential& pot, int N, double ell, int grid_size) {
  double L = static_cast<double>(N) * ell;
  int n = grid_size;
  double h = L / n;
  // nodes r_i = i h, i = 1..n; symmetric tridiagonal A, mass B = diag(1,..,1,1/2)
  Eigen::VectorXd diag(n), off(n - 1), Bm(n);
  for (int i = 1; i <= n; ++i) {
    double Vi = pot(i * h);
    if (i < n) {
      diag[i - 1] = 2.0 / (h * h) + 0.5 * Vi;
      Bm[i - 1] = 1.0;
    } else {
      diag[i - 1] = (1.0 - h / L) / (h * h) + 0.25 * Vi;
      Bm[i - 1] = 0.5;
    }
  }
  for (int i = 0; i < n - 1; ++i) off[i] = -1.0 / (h * h);

  // LDL^T factorization of A (positive definite for V >= 0 on this problem)
  Eigen::VectorXd d(n), l(n - 1);
  d[0] = diag[0];
  for (int i = 1; i < n; ++i) {
    l[i - 1] = off[i - 1] / d[i - 1];
    d[i] = diag[i] - l[i - 1] * off[i - 1];
    if (d[i] <= 0.0)
      throw ConvergenceError("scattering::neumann_lambda_fd: factorization lost positivity");
  }
  auto solveA = [&](Eigen::VectorXd b) {
    for (int i = 1; i < n; ++i) b[i] -= l[i - 1] * b[i - 1];
    for (int i = 0; i < n; ++i) b[i] /= d[i];
    for (int i = n - 2; i >= 0; --i) b[i] -= l[i] * b[i + 1];
    return b;
  };

  bool deflate = pot.is_zero();
  Eigen::VectorXd r0(n);
  for (int i = 1; i <= n; ++i) r0[i - 1] = i * h;  // trivial mode m = r (lambda = 0)
  auto project = [&](Eigen::VectorXd& x) {
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
      num += x[i] * Bm[i] * r0[i];
      den += r0[i] * Bm[i] * r0[i];
    }
    x -= (num / den) * r0;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin((i + 1) * kPi / (2.0 * n));
  if (deflate) project(x);
  double lam = 0.0, lam_prev = 1e300;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd bx = Bm.cwiseProduct(x);
    Eigen::VectorXd y = solveA(bx);
    if (deflate) project(y);
    double ynorm = std::sqrt(y.cwiseProduct(Bm.cwiseProduct(y)).sum());
    y /= ynorm;
    // Rayleigh quotient via A y = (tridiagonal apply)
    Eigen::VectorXd Ay(n);
    for (int i = 0; i < n; ++i) {
      double v = diag[i] * y[i];
      if (i > 0) v += off[i - 1] * y[i - 1];
      if (i < n - 1) v += off[i] * y[i + 1];
      Ay[i] = v;
    }
    lam = y.dot(Ay) / y.cwiseProduct(Bm.cwiseProduct(y)).sum();
    x = y;
    if (std::abs(lam - lam_prev) <= 1e-13 * std::abs(lam)) return lam;
    lam_prev = lam;
  }
  throw ConvergenceError("scattering::neumann_lambda_fd: inverse iteration stalled");
}

double ScatteringSolution::radial_integral(const Eigen::VectorXd& integrand) const {
  KahanSum acc;
  for (std::size_t b = 0; b + 1 < block_edges_.size(); ++b) {
    Eigen::Index i0 = block_edges_[b], i1 = block_edges_[b + 1];
    double h = r[i0 + 1] - r[i0];
    std::vector<double> slice(integrand.data() + i0, integrand.data() + i1 + 1);
    acc.add(simpson_uniform(slice, h));
  }
  return acc.value();
}

namespace {

// Simpson over the blocks entirely inside [0, Rmax]
double support_integral(const ScatteringSolution& sol,
                        const std::vector<Eigen::Index>& edges, double Rmax,
                        const std::function<double(Eigen::Index)>& fn) {
  KahanSum acc;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    Eigen::Index i0 = edges[b], i1 = edges[b + 1];
    if (sol.r[i1] > Rmax * (1.0 + 1e-12)) break;
    double h = sol.r[i0 + 1] - sol.r[i0];
    std::vector<double> slice(static_cast<std::size_t>(i1 - i0 + 1));
    for (Eigen::Index i = i0; i <= i1; ++i) slice[i - i0] = fn(i);
    acc.add(simpson_uniform(slice, h));
  }
  return acc.value();
}

}  // namespace

double ScatteringSolution::vf_hat(double k) const {
  const RadialPotential& V = *pot_;
  double Rmax = V.support_radius();
  return support_integral(*this, block_edges_, Rmax, [&](Eigen::Index i) {
    return 4.0 * kPi * r[i] * r[i] * V(r[i]) * f(i) * sinc(k * r[i]);
  });
}

double ScatteringSolution::vw_hat(double k) const {
  const RadialPotential& V = *pot_;
  double Rmax = V.support_radius();
  return support_integral(*this, block_edges_, Rmax, [&](Eigen::Index i) {
    return 4.0 * kPi * r[i] * r[i] * V(r[i]) * w(i) * sinc(k * r[i]);
  });
}

double ScatteringSolution::vw2_hat0() const {
  const RadialPotential& V = *pot_;
  double Rmax = V.support_radius();
  return support_integral(*this, block_edges_, Rmax, [&](Eigen::Index i) {
    double wi = w(i);
    return 4.0 * kPi * r[i] * r[i] * V(r[i]) * wi * wi;
  });
}

double ScatteringSolution::grad_w_sq() const {
  // w' = -f' = (m - r m') / r^2; at r = 0, f'(0) = 0 by radial symmetry.
  Eigen::VectorXd y(r.size());
  y[0] = 0.0;
  for (Eigen::Index i = 1; i < r.size(); ++i) {
    double wp = (m[i] - r[i] * mp[i]) / (r[i] * r[i]);
    y[i] = 4.0 * kPi * r[i] * r[i] * wp * wp;
  }
  return radial_integral(y);
}

double ScatteringSolution::w_sq_integral() const {
  Eigen::VectorXd y(r.size());
  y[0] = 4.0 * kPi * 0.0;
  for (Eigen::Index i = 1; i < r.size(); ++i) {
    double wi = w(i);
    y[i] = 4.0 * kPi * r[i] * r[i] * wi * wi;
  }
  return radial_integral(y);
}

double integral_w(const ScatteringSolution& sol) {
  // 4 pi int r^2 w dr with r^2 w = r (r - m)
  Eigen::VectorXd y(sol.r.size());
  for (Eigen::Index i = 0; i < sol.r.size(); ++i)
    y[i] = 4.0 * kPi * sol.r[i] * (sol.r[i] - sol.m[i]);
  return sol.radial_integral(y);
}

double w_hat(const ScatteringSolution& sol, double k) {
  if (k < 0.0) throw ValidationError("scattering::w_hat: k must be >= 0");
  Eigen::VectorXd y(sol.r.size());
  for (Eigen::Index i = 0; i < sol.r.size(); ++i)
    y[i] = 4.0 * kPi * sol.r[i] * (sol.r[i] - sol.m[i]) * sinc(k * sol.r[i]);
  return sol.radial_integral(y);
}

EtaTable eta_coefficients(const ScatteringSolution& sol, int M) {
  if (M < 1) throw ValidationError("scattering::eta_coefficients: M must be >= 1");
  EtaTable t;
  t.M = M;
  t.N = sol.N;
  t.ell = sol.ell;
  t.sol_ = &sol;
  double N2 = static_cast<double>(sol.N) * sol.N;
  t.eta0 = -w_hat(sol, 0.0) / N2;
  // one radial evaluation per squared-norm class
  for (int x = 0; x <= M; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        long long n2 = static_cast<long long>(x) * x + static_cast<long long>(y) * y +
                       static_cast<long long>(z) * z;
        if (t.vals_.count(n2)) continue;
        double p = kTwoPi * std::sqrt(static_cast<double>(n2));
        t.vals_[n2] = -w_hat(sol, p / sol.N) / N2;
      }
  t.l2_exact_ = sol.w_sq_integral() * (1.0 / sol.N) - t.eta0 * t.eta0;
  double C = 0.0;
  for (const auto& [n2, e] : t.vals_)
    C = std::max(C, std::abs(e) * kTwoPi * kTwoPi * static_cast<double>(n2));
  t.env_C_ = C;
  return t;
}

bool EtaTable::in_cube(const Int3& n) const {
  return std::abs(n.x) <= M && std::abs(n.y) <= M && std::abs(n.z) <= M;
}

double EtaTable::eta(const Int3& n) const {
  if (n.is_zero()) return eta0;
  if (!in_cube(n)) throw ValidationError("scattering::EtaTable: momentum outside cutoff");
  return vals_.at(n.norm2());
}

double EtaTable::eta_norm2(long long n2) const {
  if (n2 == 0) return eta0;
  auto it = vals_.find(n2);
  if (it == vals_.end())
    throw ValidationError("scattering::EtaTable: squared norm not tabulated");
  return it->second;
}

double EtaTable::l2norm_sq_table() const {
  KahanSum sq;
  for_cube(M, [&](const Int3& n) {
    double e = vals_.at(n.norm2());
    sq.add(e * e);
  });
  return sq.value();
}

double EtaTable::l2norm_sq_exact() const { return l2_exact_; }

double EtaTable::l2norm_tail() const { return std::max(0.0, l2_exact_ - l2norm_sq_table()); }

double EtaTable::envelope_C() const { return env_C_; }

EtaRelationReport eta_relation_residual(const ScatteringSolution& sol,
                                        const EtaTable& table, const Int3& n) {
  if (!table.in_cube(n))
    throw ValidationError("scattering::eta_relation_residual: p outside table cutoff");
  const int M = table.M;
  const int N = sol.N;
  double p2 = n.pnorm2();
  double pn = n.pnorm();
  double k = pn / N;

  // radial caches over the difference cube
  std::map<long long, double> vhat_cache, chi_cache;
  auto vhat_d = [&](long long d2) {
    auto it = vhat_cache.find(d2);
    if (it != vhat_cache.end()) return it->second;
    double v = fourier_hat(sol.potential(), kTwoPi * std::sqrt(static_cast<double>(d2)) / N);
    vhat_cache[d2] = v;
    return v;
  };
  auto chi_d = [&](long long d2) {
    auto it = chi_cache.find(d2);
    if (it != chi_cache.end()) return it->second;
    double v = chi_hats(sol.ell, kTwoPi * std::sqrt(static_cast<double>(d2))).chi;
    chi_cache[d2] = v;
    return v;
  };

  KahanSum convV, convChi;
  // q = 0 terms
  convV.add(vhat_d(n.norm2()) * table.eta0);
  convChi.add(chi_d(n.norm2()) * table.eta0);
  for_cube(M, [&](const Int3& q) {
    Int3 d = n - q;
    double eq = table.eta_norm2(q.norm2());
    convV.add(vhat_d(d.norm2()) * eq);
    convChi.add(chi_d(d.norm2()) * eq);
  });

  EtaRelationReport rep;
  double eta_p = table.eta(n);
  double lam = sol.lambda;
  double N3lam = static_cast<double>(N) * N * N * lam;

  rep.lhs = p2 * eta_p + 0.5 * fourier_hat(sol.potential(), k) + convV.value() / (2.0 * N);
  rep.rhs = N3lam * (chi_d(n.norm2()) + convChi.value() / N);

  // exact position-space values of the full-lattice convolutions
  double convV_exact = -sol.vw_hat(k);                       // (1/N) sum_q V̂((p-q)/N) eta_q
  // (1/N) sum over the full lattice of chi_hat(p-q) eta_q:
  //   chi_l f_l(N.) coefficient minus the delta term.
  Eigen::VectorXd y(sol.r.size());
  for (Eigen::Index i = 0; i < sol.r.size(); ++i) {
    double ri = sol.r[i];
    double fi = (i == 0) ? sol.mp[0] : sol.m[i] / ri;
    y[i] = 4.0 * kPi * ri * ri * fi * sinc(pn * ri / N);
  }
  double rhs_exact = lam * sol.radial_integral(y);           // N^3 lam * coeff of chi f(N.)
  rep.lhs_tail = std::abs(convV_exact / 2.0 - convV.value() / (2.0 * N));
  rep.rhs_tail = std::abs(rhs_exact - rep.rhs);
  rep.residual = std::abs(rep.lhs - rep.rhs) / (std::abs(rep.lhs) + std::abs(rep.rhs) + 1e-300);
  rep.outside_core = (n.norm2() > static_cast<long long>(M / 4) * (M / 4));
  return rep;
}

}  // namespace gpbog
