#include "gpbog/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gpbog/fft3.hpp"
#include "gpbog/quadrature.hpp"

namespace gpbog {

double square_partial_sum(const std::function<double(const Int3&)>& f, int M) {
  if (M < 1) throw ValidationError("lattice::square_partial_sum: M must be >= 1");
  KahanSum acc;
  for_cube(M, [&](const Int3& n) { acc.add(f(n)); });
  return acc.value();
}

namespace {

// multiplicity of the octahedral orbit of (x >= y >= z >= 0)
double orbit_mult(int x, int y, int z) {
  int perms;
  if (x == y && y == z)
    perms = 1;
  else if (x == y || y == z)
    perms = 3;
  else
    perms = 6;
  int nz = (x > 0) + (y > 0) + (z > 0);
  return static_cast<double>(perms) * static_cast<double>(1 << nz);
}

}  // namespace

Eigen::VectorXd cube_partial_trace(const RadialSummand& f, int Mmax) {
  // bucket[m] = contribution of points with max|n_i| = m, via one
  // octahedrally reduced pass with radial value memoization
  std::vector<double> bucket(Mmax + 1, 0.0);
  std::vector<double> rv(static_cast<std::size_t>(3) * Mmax * Mmax + 1,
                         std::numeric_limits<double>::quiet_NaN());
  for (int x = 0; x <= Mmax; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        long long n2 = static_cast<long long>(x) * x + static_cast<long long>(y) * y +
                       static_cast<long long>(z) * z;
        double& v = rv[static_cast<std::size_t>(n2)];
        if (std::isnan(v)) v = f(n2);
        bucket[x] += orbit_mult(x, y, z) * v;
      }
  Eigen::VectorXd trace(Mmax);
  KahanSum acc;
  for (int m = 1; m <= Mmax; ++m) {
    acc.add(bucket[m]);
    trace[m - 1] = acc.value();
  }
  return trace;
}

Eigen::VectorXd trailing_mean(const Eigen::VectorXd& x, int w) {
  if (w < 1 || x.size() < w) throw ValidationError("lattice::trailing_mean: window too large");
  Eigen::VectorXd out(x.size() - w + 1);
  double s = 0.0;
  for (int i = 0; i < w; ++i) s += x[i];
  out[0] = s / w;
  for (Eigen::Index i = w; i < x.size(); ++i) {
    s += x[i] - x[i - w];
    out[i - w + 1] = s / w;
  }
  return out;
}

LatticeSumResult averaged_square_sum(const RadialSummand& f, int Mmax, int window,
                                     const std::string& method_tag) {
  LatticeSumResult r;
  r.cutoff = Mmax;
  r.method = method_tag;
  // clamp so three passes fit into a short trace; the error estimate then
  // honestly reports the unconverged oscillation
  r.window = std::max(2, std::min(window, (Mmax - 4) / 3));
  window = r.window;
  r.trace = cube_partial_trace(f, Mmax);
  r.averaged = trailing_mean(r.trace, window);
  r.twice_averaged = trailing_mean(r.averaged, window);
  Eigen::VectorXd third = trailing_mean(r.twice_averaged, window);
  r.value = third[third.size() - 1];
  double inc = 0.0;
  for (Eigen::Index i = std::max<Eigen::Index>(1, third.size() - 10); i < third.size(); ++i)
    inc = std::max(inc, std::abs(third[i] - third[i - 1]));
  r.error_estimate = inc;
  return r;
}

LatticeSumResult shell_sum(const RadialSummand& f, int Mball) {
  if (Mball < 2) throw ValidationError("lattice::shell_sum: cutoff too small");
  // shells: distinct |n|^2 <= Mball^2, ascending; counts via reduced pass
  long long n2max = static_cast<long long>(Mball) * Mball;
  std::vector<double> counts(static_cast<std::size_t>(n2max) + 1, 0.0);
  for (int x = 0; x <= Mball; ++x)
    for (int y = 0; y <= x; ++y)
      for (int z = 0; z <= y; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        long long n2 = static_cast<long long>(x) * x + static_cast<long long>(y) * y +
                       static_cast<long long>(z) * z;
        if (n2 > n2max) continue;
        counts[static_cast<std::size_t>(n2)] += orbit_mult(x, y, z);
      }
  LatticeSumResult r;
  r.method = "shell+tail";
  r.cutoff = Mball;
  KahanSum acc;
  std::vector<double> partials, envs;
  std::vector<long long> shells;
  for (long long n2 = 1; n2 <= n2max; ++n2) {
    if (counts[static_cast<std::size_t>(n2)] == 0.0) continue;
    double v = f(n2);
    acc.add(counts[static_cast<std::size_t>(n2)] * v);
    partials.push_back(acc.value());
    shells.push_back(n2);
    envs.push_back(std::abs(v));
  }
  r.value = acc.value();
  r.trace = Eigen::Map<Eigen::VectorXd>(partials.data(), partials.size());
  // envelope fit |f| ~ C / p^4 on the outer 20% of shells; tail = C / (2 pi^2 P)
  // from sum_{|p|>P} p^-4 ~ 1/(2 pi^2 P), P = 2 pi Mball
  double C = 0.0;
  std::size_t start = shells.size() - std::max<std::size_t>(2, shells.size() / 5);
  for (std::size_t i = start; i < shells.size(); ++i) {
    double p4 = std::pow(kTwoPi, 4.0) * static_cast<double>(shells[i]) * shells[i];
    C = std::max(C, envs[i] * p4);
  }
  r.error_estimate = C / (2.0 * kPi * kPi * kTwoPi * Mball);
  return r;
}

ChiHats chi_hats(double ell, double p) {
  if (ell <= 0.0) throw ValidationError("lattice::chi_hats: ell must be positive");
  if (p < 0.0) throw ValidationError("lattice::chi_hats: p must be >= 0 (radial)");
  ChiHats out;
  double x = ell * p;
  if (x < 1e-4) {
    double x2 = x * x;
    out.chi = 4.0 * kPi * ell * ell * ell / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0));
    out.chi_r2 = 4.0 * kPi * std::pow(ell, 5) / 5.0 * (1.0 - 5.0 * x2 / 42.0);
    out.chi_over_r = 2.0 * kPi * ell * ell * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0));
    return out;
  }
  double s = std::sin(x), c = std::cos(x);
  out.chi = 4.0 * kPi / (p * p) * (s / p - ell * c);
  out.chi_r2 = 4.0 * kPi * std::pow(ell, 5) *
               (-6.0 * s / std::pow(x, 5) + 6.0 * c / std::pow(x, 4) + 3.0 * s / std::pow(x, 3) -
                c / (x * x));
  out.chi_over_r = 4.0 * kPi * (1.0 - c) / (p * p);
  return out;
}

ELambdaResult e_lambda(int M_max) {
  if (M_max < 20) throw ValidationError("lattice::e_lambda: M_max must be >= 20");
  ELambdaResult r;
  // phase advances ~1 rad per cube shell; window = two periods
  r.S = averaged_square_sum(
      [](long long n2) { return std::cos(std::sqrt(static_cast<double>(n2))) / n2; }, M_max, 13);
  if (r.S.error_estimate > 1e-3)
    throw ConvergenceError("lattice::e_lambda: averaged trace still oscillating at M_max");
  r.candidate_1 = 2.0 - r.S.value;
  r.candidate_4 = 2.0 - 4.0 * r.S.value;
  return r;
}

void adjudicate_e_lambda(ELambdaResult& e, double born_value, double iell_value) {
  e.born_route = born_value;
  e.iell_route = iell_value;
  double d1 = std::abs(e.candidate_1 - born_value) + std::abs(e.candidate_1 - iell_value);
  double d4 = std::abs(e.candidate_4 - born_value) + std::abs(e.candidate_4 - iell_value);
  if (d4 <= d1) {
    e.adjudicated = e.candidate_4;
    e.winner = "2-4S";
  } else {
    e.adjudicated = e.candidate_1;
    e.winner = "2-S";
  }
}

IEllResult i_ell(double ell, int M_max) {
  if (!(ell > 0.0 && ell < 0.5)) throw ValidationError("lattice::i_ell: need 0 < ell < 1/2");
  IEllResult r;
  // sum over p = 2 pi n: cos(ell |p|)/p^2; phase step 2 pi ell per shell
  int window = std::max(5, static_cast<int>(std::lround(2.0 / ell)));
  r.sum = averaged_square_sum(
      [ell](long long n2) {
        double nn = std::sqrt(static_cast<double>(n2));
        return std::cos(kTwoPi * ell * nn) / (kTwoPi * kTwoPi * n2);
      },
      M_max, window);
  if (r.sum.error_estimate > 1e-3)
    throw ConvergenceError("lattice::i_ell: averaged trace still oscillating at M_max");
  r.I_ell = 4.0 * kPi * ell * ell / 3.0 - 8.0 * kPi / 3.0 * r.sum.value;

  // identity: -(2/ell^3) sum chi_hat(p)/p^2 = I_ell - 1/ell - 4 pi ell^2/15;
  // absolutely convergent but oscillating, same smoothing.
  LatticeSumResult chi_sum = averaged_square_sum(
      [ell](long long n2) {
        double p = kTwoPi * std::sqrt(static_cast<double>(n2));
        return chi_hats(ell, p).chi / (p * p);
      },
      M_max, window);
  r.chi_route_lhs = -2.0 / (ell * ell * ell) * chi_sum.value;
  double rhs = r.I_ell - 1.0 / ell - 4.0 * kPi * ell * ell / 15.0;
  r.identity_residual = std::abs(r.chi_route_lhs - rhs);
  return r;
}

// ---------------------------------------------------------------------------
// Born chains on the momentum cube

BornResult born_a_N(const RadialPotential& pot, int N, int k_max, int M) {
  if (k_max < 1 || k_max > 3)
    throw ValidationError("lattice::born_a_N: k_max must be in {1,2,3}");
  if (M < 2) throw ValidationError("lattice::born_a_N: grid half-width too small");
  BornResult res;
  double V0 = fourier_hat(pot, 0.0);

  // radial V-hat cache on the difference cube
  std::vector<double> vh(static_cast<std::size_t>(3) * (2 * M) * (2 * M) + 1,
                         std::numeric_limits<double>::quiet_NaN());
  auto vhat_n2 = [&](long long n2) {
    double& v = vh[static_cast<std::size_t>(n2)];
    if (std::isnan(v))
      v = fourier_hat(pot, kTwoPi * std::sqrt(static_cast<double>(n2)) / N);
    return v;
  };

  CubeField kernel(2 * M);
  for (int x = -2 * M; x <= 2 * M; ++x)
    for (int y = -2 * M; y <= 2 * M; ++y)
      for (int z = -2 * M; z <= 2 * M; ++z)
        kernel.at({x, y, z}) =
            vhat_n2(static_cast<long long>(x) * x + static_cast<long long>(y) * y +
                    static_cast<long long>(z) * z);

  // D_1(p) = V̂(p/N); D_{j+1}(p) = sum_q V̂((p-q)/N) D_j(q)/q^2  (q != 0)
  CubeField D(M);
  for_cube(M, [&](const Int3& n) { D.at(n) = vhat_n2(n.norm2()); });

  res.partial.push_back(V0);
  double sign = -1.0;
  double invN = 1.0 / (2.0 * N);
  double factor = invN;
  for (int k = 1; k <= k_max; ++k) {
    // term_k = (-1)^k (2N)^{-k} sum_p V̂(p/N) D_k(p) / p^2
    KahanSum acc;
    for_cube(M, [&](const Int3& n) {
      double s = vhat_n2(n.norm2()) * D.at(n) / n.pnorm2();
      acc.add(s);
    });
    double term = sign * factor * acc.value();
    res.term.push_back(term);
    res.partial.push_back(res.partial.back() + term);

    // envelope tail: fit |summand| ~ C/q^6 on the outer shells (valid once
    // V̂ decay is resolved, i.e. 2 pi M / N beyond the support scale)
    double C6 = 0.0;
    int shell_lo = std::max(1, static_cast<int>(std::lround(0.8 * M)));
    for (int x = shell_lo; x <= M; ++x) {
      long long n2 = static_cast<long long>(x) * x;
      double q2 = kTwoPi * kTwoPi * static_cast<double>(n2);
      double s = std::abs(vhat_n2(n2) * D.at({x, 0, 0}) / q2);
      C6 = std::max(C6, s * q2 * q2 * q2);
    }
    res.tail.push_back(factor * C6 / (6.0 * kPi * kPi * std::pow(kTwoPi * M, 3)));

    if (k < k_max) {
      CubeField g(M);
      for_cube(M, [&](const Int3& n) { g.at(n) = D.at(n) / n.pnorm2(); });
      D = convolve_cube(kernel, g);
      factor *= invN;
      sign = -sign;
    }
  }
  res.grid_too_small = (kTwoPi * M < 1.5 * N * kPi / pot.support_radius());
  double first_correction = std::abs(res.term.empty() ? 0.0 : res.term[0]);
  res.weak_warning = first_correction > 0.3 * V0;
  return res;
}

// ---------------------------------------------------------------------------
// Matched-truncation second-Born defect and the e_Lambda limit

namespace {

// int over the unit cube of 1/|u|^2: 3 * int_{[-1,1]^2} da db / (1+a^2+b^2)
double unit_cube_inv_r2() {
  static const double val = [] {
    auto f = [](double b) {
      double c = std::sqrt(1.0 + b * b);
      return 2.0 * std::atan(1.0 / c) / c;
    };
    return 3.0 * gl_panels(f, -1.0, 1.0, 64, 12);
  }();
  return val;
}

}  // namespace

BornLimitResult born_limit(const RadialPotential& pot, const std::vector<int>& Ns,
                           double kappa_max) {
  if (Ns.size() < 2) throw ValidationError("lattice::born_limit: need at least two N values");
  BornLimitResult out;
  out.Ns = Ns;
  const double R = pot.support_radius();
  const double V0 = fourier_hat(pot, 0.0);
  const double pref = 0.5 / std::pow(kTwoPi, 3);

  GaussLegendre g5(5);
  std::vector<double> gx(5), gw(5);
  for (int i = 0; i < 5; ++i) {
    gx[i] = 0.5 * g5.x[i];
    gw[i] = 0.5 * g5.w[i];
  }
  // fourier_hat quadrature per cell node would dominate the run; use the
  // closed form when available.
  const bool soft = pot.kind() == PotentialKind::SoftSphere;
  const double v0s = pot.strength();
  auto vhat_fast = [&](double k) {
    if (!soft) return fourier_hat(pot, k);
    double x = k * R;
    if (x < 1e-4) {
      double x2 = x * x;
      return 4.0 * kPi * v0s * R * R * R * (1.0 / 3.0 - x2 / 30.0 * (1.0 - x2 / 28.0));
    }
    return 4.0 * kPi * v0s * (std::sin(x) - x * std::cos(x)) / (k * k * k);
  };
  auto Ffast = [&](double k2) {
    double k = std::sqrt(k2);
    double v = vhat_fast(k);
    return pref * v * v / k2;
  };

  for (int N : Ns) {
    double h = kTwoPi / N;
    int Mc = static_cast<int>(std::ceil(kappa_max / h));
    // sum over cells of (midpoint - 5^3 Gauss cell integral), octahedral orbits
    KahanSum acc;
    for (int x = 0; x <= Mc; ++x)
      for (int y = 0; y <= x; ++y)
        for (int z = 0; z <= y; ++z) {
          if (x == 0 && y == 0 && z == 0) continue;
          double mult = orbit_mult(x, y, z);
          double k2m = h * h * (static_cast<double>(x) * x + static_cast<double>(y) * y +
                                static_cast<double>(z) * z);
          double mid = Ffast(k2m);
          double cell = 0.0;
          for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
              for (int l = 0; l < 5; ++l) {
                double kx = h * (x + gx[i]), ky = h * (y + gx[j]), kz = h * (z + gx[l]);
                cell += gw[i] * gw[j] * gw[l] * Ffast(kx * kx + ky * ky + kz * kz);
              }
          acc.add(mult * (mid - cell));
        }
    // origin cell: (1/2)(2pi)^-3 [ V̂(0)^2 C0 h + int (V̂^2 - V̂(0)^2)/k^2 ]
    double sm = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int l = 0; l < 5; ++l) {
          double kx = h * gx[i], ky = h * gx[j], kz = h * gx[l];
          double k2 = kx * kx + ky * ky + kz * kz;
          double gval;
          if (k2 < 1e-30) {
            gval = -V0 * V0 * R * R / 5.0;
          } else {
            double v = vhat_fast(std::sqrt(k2));
            gval = (v * v - V0 * V0) / k2;
          }
          sm += gw[i] * gw[j] * gw[l] * gval;
        }
    double center = pref * (V0 * V0 * unit_cube_inv_r2() * h + h * h * h * sm);
    // D = (lattice sum) - (integral); 8 pi (a0 - a_N) at second order = D
    double D = h * h * h * acc.value() - center;
    // B_N = 4 pi (N-1) (a_N - a0) / (V̂(0)/8 pi)^2 = -(N-1) D / (2 (V̂0/8pi)^2)
    double norm = (V0 / (8.0 * kPi)) * (V0 / (8.0 * kPi));
    out.B_N.push_back(-(N - 1) * D / (2.0 * norm));
  }
  // Richardson in 1/N over the last pairs
  std::vector<double> rich;
  for (std::size_t i = 0; i + 1 < out.B_N.size(); ++i) {
    double n1 = out.Ns[i], n2 = out.Ns[i + 1];
    rich.push_back((n2 * out.B_N[i + 1] - n1 * out.B_N[i]) / (n2 - n1));
  }
  out.extrapolated = rich.back();
  out.abs_limit = std::abs(out.extrapolated);
  out.richardson_spread =
      rich.size() > 1 ? std::abs(rich.back() - rich[rich.size() - 2]) : 0.0;
  out.sign = out.extrapolated >= 0 ? +1 : -1;
  // weak check: second Born term vs V̂(0), continuum estimate
  double I1 = pref * 4.0 * kPi *
              gl_panels([&](double k) { double v = vhat_fast(k); return v * v; }, 0.0,
                        200.0 / R, 4000, 8);
  out.weak_warning = I1 > 0.3 * V0;
  return out;
}

}  // namespace gpbog
