#pragma once

#include <functional>
#include <vector>

namespace gpbog {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Supported orders: 5 (tabulated) and arbitrary n via Newton iteration.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

/// Integrates f over [a, b] with `panels` equal Gauss-Legendre panels of order k.
double gl_panels(const std::function<double(double)>& f, double a, double b,
                 int panels, int order = 8);

/// Panel-doubling integration: doubles the panel count until the relative
/// change drops below rtol. Used where the integrand may be merely
/// piecewise-continuous. Breakpoints are honored as panel boundaries.
double gl_adaptive_panels(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double rtol = 1e-12,
                          int max_doublings = 16);

/// Composite Simpson rule over tabulated samples on a uniform grid.
double simpson_uniform(const std::vector<double>& y, double h);

}  // namespace gpbog
