#include "gpbog/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpbog/common.hpp"

namespace gpbog {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw ValidationError("GaussLegendre: order must be >= 1");
  x.resize(n);
  w.resize(n);
  // Newton iteration on Legendre roots, seeded by the Chebyshev approximation.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0, p2 = 0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * xi * p2 - j * p3) / (j + 1);
      }
      double dp = n * (xi * p1 - p2) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p1 = 1.0;
    p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * xi * p2 - j * p3) / (j + 1);
    }
    double dp = n * (xi * p1 - p2) / (xi * xi - 1.0);
    x[i] = -xi;
    x[n - 1 - i] = xi;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

double gl_panels(const std::function<double(double)>& f, double a, double b,
                 int panels, int order) {
  static thread_local int cached_order = -1;
  static thread_local GaussLegendre* rule = nullptr;
  if (cached_order != order) {
    delete rule;
    rule = new GaussLegendre(order);
    cached_order = order;
  }
  KahanSum acc;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) acc.add(0.5 * h * rule->w[i] * f(c + 0.5 * h * rule->x[i]));
  }
  return acc.value();
}

double gl_adaptive_panels(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double rtol,
                          int max_doublings) {
  std::vector<double> edges{a};
  for (double t : breakpoints)
    if (t > a && t < b) edges.push_back(t);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  auto eval = [&](int panels_per_segment) {
    KahanSum acc;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s)
      acc.add(gl_panels(f, edges[s], edges[s + 1], panels_per_segment));
    return acc.value();
  };

  int panels = 1;
  double prev = eval(panels);
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    double cur = eval(panels);
    if (std::abs(cur - prev) <= rtol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  throw ConvergenceError("gl_adaptive_panels: panel doubling did not converge");
}

double simpson_uniform(const std::vector<double>& y, double h) {
  std::size_t n = y.size();
  if (n < 2) return 0.0;
  KahanSum acc;
  std::size_t m = n - 1;  // interval count
  std::size_t even_end = (m % 2 == 0) ? m : m - 1;
  for (std::size_t i = 0; i + 2 <= even_end; i += 2)
    acc.add(h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]));
  if (m % 2 == 1)  // trailing interval: 3/8-style correction with last three points
    acc.add(h / 12.0 * (-y[n - 3] + 8.0 * y[n - 2] + 5.0 * y[n - 1]));
  return acc.value();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(std::abs(y[i]) > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw ValidationError("loglog_slope: need at least two usable points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gpbog
