#include "gpbog/bogoliubov.hpp"

#include <algorithm>
#include <cmath>

#include "gpbog/lattice.hpp"

namespace gpbog {

std::pair<double, double> hyperbolic_pair(double eta) {
  if (!std::isfinite(eta)) throw ValidationError("bogoliubov::hyperbolic_pair: eta not finite");
  return {std::sinh(eta), std::cosh(eta)};
}

const QuadCoeffs& QuadraticForm::at_norm2(long long n2) const {
  auto it = radial.find(n2);
  if (it == radial.end())
    throw ValidationError("bogoliubov::QuadraticForm: squared norm not in the momentum set");
  return it->second;
}

namespace {

// distinct squared norms in the cube |n_i| <= M
std::vector<long long> cube_norms(int M) {
  std::vector<char> seen(static_cast<std::size_t>(3) * M * M + 1, 0);
  for (int x = 0; x <= M; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        seen[static_cast<std::size_t>(x) * x + static_cast<std::size_t>(y) * y +
             static_cast<std::size_t>(z) * z] = 1;
      }
  std::vector<long long> out;
  for (std::size_t i = 1; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<long long>(i));
  return out;
}

// |truncated-at-table convolution - exact| at the probe p = 2 pi (1,0,0)
double conv_tail_probe(const EtaTable& table, const RadialPotential& pot, int N) {
  const ScatteringSolution& sol = table.solution();
  Int3 probe{1, 0, 0};
  KahanSum trunc;
  trunc.add(fourier_hat(pot, probe.pnorm() / N) * table.eta0);
  std::map<long long, double> cache;
  for_cube(table.M, [&](const Int3& q) {
    Int3 d = probe - q;
    long long d2 = d.norm2();
    auto it = cache.find(d2);
    double v;
    if (it == cache.end()) {
      v = fourier_hat(pot, kTwoPi * std::sqrt(static_cast<double>(d2)) / N);
      cache[d2] = v;
    } else {
      v = it->second;
    }
    trunc.add(v * table.eta_norm2(q.norm2()));
  });
  double exact = -static_cast<double>(N) * sol.vw_hat(probe.pnorm() / N);
  return std::abs(trunc.value() - exact) / N;
}

QuadraticForm quad_coeffs_impl(const EtaTable& table, const RadialPotential& pot, int N,
                               QuadraticForm::Flavor flavor) {
  if (N != table.N)
    throw ValidationError("bogoliubov::quad_coeffs: N does not match the eta table");
  const ScatteringSolution& sol = table.solution();
  QuadraticForm form;
  form.flavor = flavor;
  form.M = table.M;
  form.N = N;

  double W0 = sol.vf_hat(0.0);
  double V0 = fourier_hat(pot, 0.0);
  double U0 = W0 - V0;  // (1/N) sum_q V̂(q/N) eta_q, full lattice

  for (long long n2 : cube_norms(table.M)) {
    double pn = kTwoPi * std::sqrt(static_cast<double>(n2));
    double p2 = pn * pn;
    double k = pn / N;
    double W = sol.vf_hat(k);
    auto [s, g] = hyperbolic_pair(table.eta_norm2(n2));
    QuadCoeffs c;
    c.W = W;
    if (flavor == QuadraticForm::Flavor::JN) {
      c.A = p2 * (s * s + g * g) + W * (g + s) * (g + s);
      c.B = 2.0 * p2 * s * g + W * (g + s) * (g + s);
    } else {
      double V = fourier_hat(pot, k);
      double U = W - V;  // (1/N) sum_q V̂((p-q)/N) eta_q
      c.A = 2.0 * p2 * s * s + V * (g + s) * (g + s) + 2.0 * g * s * U - (g * g + s * s) * U0;
      c.B = 2.0 * p2 * s * g + V * (g + s) * (g + s) + (g * g + s * s) * U - 2.0 * g * s * U0;
    }
    form.radial[n2] = c;
  }

  form.conv_tail_probe = conv_tail_probe(table, pot, N);
  double min_abs_A = std::numeric_limits<double>::infinity();
  for (const auto& [n2, c] : form.radial) min_abs_A = std::min(min_abs_A, std::abs(c.A));
  form.cutoff_flag = form.conv_tail_probe > 0.01 * min_abs_A;
  return form;
}

}  // namespace

QuadraticForm quad_coeffs_J(const EtaTable& table, const RadialPotential& pot, int N) {
  return quad_coeffs_impl(table, pot, N, QuadraticForm::Flavor::JN);
}

QuadraticForm quad_coeffs_G(const EtaTable& table, const RadialPotential& pot, int N) {
  return quad_coeffs_impl(table, pot, N, QuadraticForm::Flavor::GN);
}

DiagonalizedForm diagonalize(const QuadraticForm& form) {
  DiagonalizedForm d;
  for (const auto& [n2, c] : form.radial) {
    if (!(std::abs(c.B) < c.A))
      throw ConvergenceError("bogoliubov::diagonalize: |G_p| >= F_p at |n|^2 = " +
                             std::to_string(n2) + " (Bogoliubov-unstable input)");
    double ratio = c.B / c.A;
    d.tau[n2] = 0.25 * std::log((1.0 - ratio) / (1.0 + ratio));
    d.eps[n2] = std::sqrt((c.A - c.B) * (c.A + c.B));
  }
  // shift over the cube with orbit multiplicities
  std::map<long long, double> counts;
  for (int x = 0; x <= form.M; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        int perms = (x == y && y == z) ? 1 : ((x == y || y == z) ? 3 : 6);
        int nz = (x > 0) + (y > 0) + (z > 0);
        counts[static_cast<long long>(x) * x + static_cast<long long>(y) * y +
               static_cast<long long>(z) * z] += perms * (1 << nz);
      }
  KahanSum shift;
  for (const auto& [n2, cnt] : counts)
    shift.add(0.5 * cnt * (d.eps.at(n2) - form.at_norm2(n2).A));
  d.shift = shift.value();
  return d;
}

double dispersion_limit(double a0, double pnorm) {
  if (a0 < 0.0) throw ValidationError("bogoliubov::dispersion_limit: a0 must be >= 0");
  double p2 = pnorm * pnorm;
  return std::sqrt(p2 * p2 + 16.0 * kPi * a0 * p2);
}

namespace {

// shell-ordered sum of a radial summand over 2 pi Z^3 \ 0 with |p| <= Lambda
double shell_accumulate(double Lambda, const std::function<double(double)>& f_of_p) {
  int Mball = static_cast<int>(std::floor(Lambda / kTwoPi));
  if (Mball < 1) throw ValidationError("bogoliubov: shell cutoff below the first shell");
  long long n2max = static_cast<long long>(Mball) * Mball;
  std::vector<double> counts(static_cast<std::size_t>(n2max) + 1, 0.0);
  for (int x = 0; x <= Mball; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        long long n2 = static_cast<long long>(x) * x + static_cast<long long>(y) * y +
                       static_cast<long long>(z) * z;
        if (n2 > n2max) continue;
        int perms = (x == y && y == z) ? 1 : ((x == y || y == z) ? 3 : 6);
        int nz = (x > 0) + (y > 0) + (z > 0);
        counts[static_cast<std::size_t>(n2)] += perms * (1 << nz);
      }
  KahanSum acc;
  for (long long n2 = 1; n2 <= n2max; ++n2) {
    double c = counts[static_cast<std::size_t>(n2)];
    if (c == 0.0) continue;
    acc.add(c * f_of_p(kTwoPi * std::sqrt(static_cast<double>(n2))));
  }
  return acc.value();
}

double ebog_summand(double p, double A) {
  double p2 = p * p;
  // 1/2 [ sqrt(p^4 + 2 A p^2) - p^2 - A + A^2/(2 p^2) ], cancellation-safe:
  // sqrt(x^2+2Ax) - x - A = -A^2 / (sqrt(x^2+2Ax) + x + A) with x = p^2
  double root = std::sqrt(p2 * p2 + 2.0 * A * p2);
  double diff = -(A * A) / (root + p2 + A);
  return 0.5 * (diff + A * A / (2.0 * p2));
}

}  // namespace

ShellSumResult ebog(double a0, double Lambda) {
  if (a0 < 0.0) throw ValidationError("bogoliubov::ebog: a0 must be >= 0");
  if (Lambda < 10.0 * kTwoPi)
    throw ValidationError("bogoliubov::ebog: shell cutoff must be >= 10 * 2pi");
  ShellSumResult r;
  r.Lambda = Lambda;
  double A = 8.0 * kPi * a0;
  if (a0 == 0.0) return r;
  r.value = shell_accumulate(Lambda, [A](double p) { return ebog_summand(p, A); });
  // summand -> A^3/(4 p^4); sum_{|p|>L} p^-4 ~ 1/(2 pi^2 L)
  r.tail = std::pow(A, 3) / (8.0 * kPi * kPi * Lambda);
  return r;
}

ShellSumResult ebog_N(const ScatteringSolution& sol, double Lambda) {
  if (Lambda < 10.0 * kTwoPi)
    throw ValidationError("bogoliubov::ebog_N: shell cutoff must be >= 10 * 2pi");
  ShellSumResult r;
  r.Lambda = Lambda;
  int N = sol.N;
  r.value = shell_accumulate(
      Lambda, [&](double p) { return ebog_summand(p, sol.vf_hat(p / N)); });
  double A0 = sol.vf_hat(0.0);
  r.tail = std::pow(A0, 3) / (8.0 * kPi * kPi * Lambda);
  return r;
}

EnergyResult ground_state_energy(int N, double a0, double e_lambda_value, double Lambda) {
  if (N < 2) throw ValidationError("bogoliubov::ground_state_energy: N must be >= 2");
  EnergyResult out;
  out.condensate_term = 4.0 * kPi * (N - 1) * a0;
  out.e_lambda_term = e_lambda_value * a0 * a0;
  if (a0 > 0.0) {
    ShellSumResult eb = ebog(a0, Lambda);
    out.ebog_value = eb.value;
    out.ebog_tail = eb.tail;
  }
  out.E_N = out.condensate_term + out.e_lambda_term + out.ebog_value;
  return out;
}

ShellSumResult diag_shift(const ScatteringSolution& sol, double Lambda) {
  ShellSumResult r;
  r.Lambda = Lambda;
  int N = sol.N;
  r.value = shell_accumulate(Lambda, [&](double p) {
    double p2 = p * p;
    double W = sol.vf_hat(p / N);
    double eta = -w_hat(sol, p / N) / (static_cast<double>(N) * N);
    auto [s, g] = hyperbolic_pair(eta);
    double F = p2 * (s * s + g * g) + W * (g + s) * (g + s);
    double G = 2.0 * p2 * s * g + W * (g + s) * (g + s);
    // -F + sqrt(F^2-G^2) = -G^2/(F + sqrt(F^2-G^2)), cancellation-safe
    double root = std::sqrt((F - G) * (F + G));
    return 0.5 * (-(G * G) / (F + root));
  });
  // |-F + eps| <= G^2/(2F) ~ (C_G/p^2)^2 / p^2 with C_G ~ int V f
  double A0 = sol.vf_hat(0.0);
  r.tail = 0.5 * A0 * A0 / (6.0 * kPi * kPi * std::pow(Lambda, 3));
  return r;
}

ShellSumResult depletion_sum(double a0, double Lambda) {
  if (a0 < 0.0) throw ValidationError("bogoliubov::depletion_sum: a0 must be >= 0");
  if (Lambda < 10.0 * kTwoPi)
    throw ValidationError("bogoliubov::depletion_sum: shell cutoff must be >= 10 * 2pi");
  ShellSumResult r;
  r.Lambda = Lambda;
  if (a0 == 0.0) return r;
  double A = 8.0 * kPi * a0;
  r.value = shell_accumulate(Lambda, [A](double p) {
    double p2 = p * p;
    double eps = std::sqrt(p2 * p2 + 2.0 * A * p2);
    // p^2 + A - eps = A^2 / (p^2 + A + eps), cancellation-safe
    double num = A * A / (p2 + A + eps);
    return num / (2.0 * eps);
  });
  // summand -> A^2/(4 p^4)
  r.tail = A * A / (8.0 * kPi * kPi * Lambda);
  return r;
}

ShellSumResult depletion_bog_route(const ScatteringSolution& sol, double Lambda) {
  ShellSumResult r;
  r.Lambda = Lambda;
  int N = sol.N;
  r.value = shell_accumulate(Lambda, [&](double p) {
    double p2 = p * p;
    double W = sol.vf_hat(p / N);
    double eta = -w_hat(sol, p / N) / (static_cast<double>(N) * N);
    auto [s, g] = hyperbolic_pair(eta);
    double F = p2 * (s * s + g * g) + W * (g + s) * (g + s);
    double G = 2.0 * p2 * s * g + W * (g + s) * (g + s);
    double root = std::sqrt((F - G) * (F + G));
    double sh2 = 0.5 * (F / root - 1.0);           // sinh^2 tau
    double shch = -0.5 * G / root;                 // sinh tau cosh tau
    return s * s + (s * s + g * g) * sh2 + 2.0 * g * s * shch;
  });
  double A0 = sol.vf_hat(0.0);
  r.tail = A0 * A0 / (8.0 * kPi * kPi * Lambda);
  return r;
}

// ---------------------------------------------------------------------------

ConstantsResult constants(const EtaTable& table, const RadialPotential& pot, int N) {
  if (N != table.N) throw ValidationError("bogoliubov::constants: N mismatch with table");
  const ScatteringSolution& sol = table.solution();
  ConstantsResult out;

  const double V0 = fourier_hat(pot, 0.0);
  const double eta0 = table.eta0;
  const double vw0 = sol.vw_hat(0.0);       // int V w
  const double vw2_0 = sol.vw2_hat0();      // int V w^2
  const double gradw2 = sol.grad_w_sq();    // 4 pi int r^2 w'^2
  const double l2eta = table.l2norm_sq_exact();

  // radial correlation (w * w)(s) = int w(y) w(y - s e) d^3y on the V support
  const Eigen::VectorXd& rg = sol.r;
  Eigen::Index n = rg.size();
  Eigen::VectorXd tw(n);
  for (Eigen::Index i = 0; i < n; ++i) tw[i] = rg[i] * sol.w(i);
  // primitive of t w(t)
  Eigen::VectorXd prim(n);
  prim[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    prim[i] = prim[i - 1] + 0.5 * (tw[i] + tw[i - 1]) * (rg[i] - rg[i - 1]);
  auto prim_at = [&](double s) {
    if (s <= 0.0) return 0.0;
    double L = rg[n - 1];
    if (s >= L) return prim[n - 1];
    // grid is blockwise uniform; binary search
    Eigen::Index lo = std::lower_bound(rg.data(), rg.data() + n, s) - rg.data();
    if (lo == 0) return prim[0];
    double t = (s - rg[lo - 1]) / (rg[lo] - rg[lo - 1]);
    return prim[lo - 1] + t * (prim[lo] - prim[lo - 1]);
  };
  auto corr_ww = [&](double s) {
    if (s <= 0.0) {
      // 4 pi int t^2 w^2
      return sol.w_sq_integral();
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double t = rg[i];
      y[i] = tw[i] * (prim_at(t + s) - prim_at(std::abs(t - s)));
    }
    return kTwoPi / s * sol.radial_integral(y);
  };
  // int V f corr and int V corr on the support
  auto support_int = [&](const std::function<double(Eigen::Index)>& fn) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
      y[i] = (rg[i] <= pot.support_radius() * (1.0 + 1e-12)) ? fn(i) : 0.0;
    return sol.radial_integral(y);
  };
  double vf_corr = support_int([&](Eigen::Index i) {
    double t = rg[i];
    return 4.0 * kPi * t * t * pot(t) * sol.f(i) * corr_ww(t);
  });
  double v_corr = support_int([&](Eigen::Index i) {
    double t = rg[i];
    return 4.0 * kPi * t * t * pot(t) * corr_ww(t);
  });

  // small absolutely convergent correction sums (sinh/cosh vs eta), |n| <= 10
  const int Msmall = 10;
  double sum_p2_s2me2 = 0.0;   // sum p^2 (sigma^2 - eta^2)
  double sum_V_delta = 0.0;    // sum V̂(p/N) (sigma gamma - eta)
  double sum_V_s2me2 = 0.0;    // sum V̂(p/N) (sigma^2 - eta^2)
  double sum_W_s2me2 = 0.0;    // sum W_p (sigma^2 - eta^2)
  double sum_s2me2 = 0.0;      // sum (sigma^2 - eta^2)
  double sum_delta_conv = 0.0; // sum delta_p (-N vw_hat(p/N) - V̂(p/N) eta0)
  double sum_abs_delta = 0.0;
  {
    std::map<long long, double> counts;
    for (int x = 0; x <= Msmall; ++x)
      for (int y = 0; y <= x; ++y)
        for (int z = 0; z <= y; ++z) {
          if (x == 0 && y == 0 && z == 0) continue;
          int perms = (x == y && y == z) ? 1 : ((x == y || y == z) ? 3 : 6);
          int nz = (x > 0) + (y > 0) + (z > 0);
          counts[x * x + y * y + z * z] += perms * (1 << nz);
        }
    for (const auto& [n2, cnt] : counts) {
      double pn = kTwoPi * std::sqrt(static_cast<double>(n2));
      double k = pn / N;
      double eta = -w_hat(sol, k) / (static_cast<double>(N) * N);
      auto [s, g] = hyperbolic_pair(eta);
      double delta = s * g - eta;
      double s2me2 = s * s - eta * eta;
      double V = fourier_hat(pot, k);
      double W = sol.vf_hat(k);
      sum_p2_s2me2 += cnt * pn * pn * s2me2;
      sum_V_delta += cnt * V * delta;
      sum_V_s2me2 += cnt * V * s2me2;
      sum_W_s2me2 += cnt * W * s2me2;
      sum_s2me2 += cnt * s2me2;
      sum_delta_conv += cnt * delta * (-N * sol.vw_hat(k) - V * eta0);
      sum_abs_delta += cnt * std::abs(delta);
    }
  }

  // exact eta-sums (position space identities)
  double sum_V_eta = -N * vw0 - V0 * eta0;    // sum_{p!=0} V̂(p/N) eta_p
  double sum_p2_eta2 = N * gradw2;            // sum_{p} p^2 eta_p^2
  double sum_V_eta2 = v_corr / N - V0 * eta0 * eta0;   // sum_{p!=0} V̂(p/N) eta_p^2
  double sum_W_eta2 = vf_corr / N - sol.vf_hat(0.0) * eta0 * eta0;
  double doubleV_etaeta =
      N * N * vw2_0 + 2.0 * eta0 * N * vw0 + V0 * eta0 * eta0;  // sum over p,q != 0

  double W0 = sol.vf_hat(0.0);

  // --- C_JN --------------------------------------------------------------
  auto& jt = out.jn_terms;
  jt["condensate"] = 0.5 * (N - 1) * V0;
  jt["p2_sigma2"] = sum_p2_eta2 + sum_p2_s2me2;  // p=0 contributes nothing
  jt["V_sigma_gamma"] = sum_V_eta + sum_V_delta;
  jt["W_sigma2"] = sum_W_eta2 + sum_W_s2me2;
  jt["double_conv"] =
      (doubleV_etaeta + 2.0 * sum_delta_conv) / (2.0 * N);  // + delta-delta, bounded below
  jt["eta_kinetic"] = gradw2;            // (1/N) sum p^2 eta^2
  jt["eta_conv"] = 0.5 * vw2_0;          // (1/2N^2) sum (V̂ * eta) eta
  out.C_JN = jt["condensate"] + jt["p2_sigma2"] + jt["V_sigma_gamma"] + jt["W_sigma2"] +
             jt["double_conv"] + jt["eta_kinetic"] + jt["eta_conv"];

  // --- C_GN --------------------------------------------------------------
  auto& gt = out.gn_terms;
  gt["condensate"] = 0.5 * (N - 1) * V0;
  gt["p2_sigma2"] = jt["p2_sigma2"];
  gt["V_sigma_gamma_plus_sigma2"] = sum_V_eta + sum_V_delta + sum_V_eta2 + sum_V_s2me2;
  gt["double_conv"] = jt["double_conv"];
  gt["eta_kinetic"] = gradw2;
  gt["eta_conv"] = 0.5 * vw2_0;
  double sum_sigma2 = l2eta + sum_s2me2;
  gt["Veta_sigma2_cross"] = -(W0 - V0) * sum_sigma2;  // -(1/N) sum_q V̂(q/N) eta_q * sum sigma^2
  out.C_GN = gt["condensate"] + gt["p2_sigma2"] + gt["V_sigma_gamma_plus_sigma2"] +
             gt["double_conv"] + gt["eta_kinetic"] + gt["eta_conv"] + gt["Veta_sigma2_cross"];

  out.tail_bound = V0 * sum_abs_delta * sum_abs_delta / (2.0 * N);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SpectrumLine> enumerate_spectrum(const std::vector<double>& eps, double zeta,
                                             std::size_t max_lines) {
  if (!(zeta > 0.0)) throw ValidationError("bogoliubov::enumerate_spectrum: zeta must be > 0");
  for (double e : eps)
    if (!(e > 0.0))
      throw ValidationError("bogoliubov::enumerate_spectrum: all eps must be positive");

  // sort modes ascending by energy, remember original indices
  std::vector<int> order(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eps[a] < eps[b]; });

  struct Entry {
    double nu;
    std::vector<std::pair<int, int>> occ;
  };
  std::vector<Entry> found;
  std::vector<std::pair<int, int>> current;

  // DFS over modes sorted by energy. Because modes are visited in ascending
  // eps order, once one copy of mode `level` exceeds the budget no deeper
  // mode fits either, so whole branches are pruned by the recursion cutoff.
  std::function<void(std::size_t, double)> walk = [&](std::size_t level, double acc) {
    // sorted eps: once the cheapest remaining mode does not fit, none do,
    // so this occupation vector is complete
    if (level == order.size() || acc + eps[order[level]] > zeta * (1.0 + 1e-15)) {
      if (found.size() >= max_lines)
        throw ConvergenceError(
            "bogoliubov::enumerate_spectrum: line-count guard tripped (more than " +
            std::to_string(max_lines) + " occupation vectors; zeta too large)");
      found.push_back({acc, current});
      return;
    }
    double e = eps[order[level]];
    walk(level + 1, acc);  // n = 0 for this mode
    double run = acc;
    for (int k = 1;; ++k) {
      run += e;
      if (run > zeta * (1.0 + 1e-15)) break;
      current.emplace_back(order[level], k);
      walk(level + 1, run);
      current.pop_back();
    }
  };
  walk(0, 0.0);

  std::stable_sort(found.begin(), found.end(),
                   [](const Entry& a, const Entry& b) { return a.nu < b.nu; });

  std::vector<SpectrumLine> lines;
  for (const auto& ent : found) {
    if (!lines.empty() && std::abs(ent.nu - lines.back().nu) <= 1e-9 * (1.0 + std::abs(ent.nu))) {
      lines.back().multiplicity += 1;
    } else {
      SpectrumLine l;
      l.nu = ent.nu;
      l.multiplicity = 1;
      l.occupation = ent.occ;
      lines.push_back(std::move(l));
    }
  }
  return lines;
}

}  // namespace gpbog
