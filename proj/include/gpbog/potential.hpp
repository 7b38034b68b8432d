#pragma once

#include <string>
#include <vector>

#include "gpbog/common.hpp"

namespace gpbog {

enum class PotentialKind { SoftSphere, Tabulated };

/// Nonnegative, radial, compactly supported interaction V. Values are in
/// energy units with box side 1; the support radius R must satisfy R < 1/2
/// for box-tied pipelines (see `make_soft_sphere`), while free-space
/// scattering computations may use any R > 0 (see `free_soft_sphere`).
class RadialPotential {
 public:
  double operator()(double r) const;
  double support_radius() const { return R_; }
  PotentialKind kind() const { return kind_; }
  double strength() const { return v0_; }  // soft sphere only
  bool is_zero() const;

  /// integral of V over R^3 (= 4*pi * int r^2 V dr)
  double integral() const;

  /// Radii where V may be non-smooth; quadrature panel boundaries.
  std::vector<double> breakpoints() const;

  friend RadialPotential make_soft_sphere(double v0, double R);
  friend RadialPotential free_soft_sphere(double v0, double R);
  friend RadialPotential make_tabulated(const std::vector<double>& r,
                                        const std::vector<double>& v);
  friend RadialPotential load_tabulated_csv(const std::string& path);
  friend RadialPotential zero_potential(double R);

 private:
  RadialPotential() = default;
  PotentialKind kind_ = PotentialKind::SoftSphere;
  double v0_ = 0.0;
  double R_ = 0.0;
  std::vector<double> tr_, tv_;  // tabulated samples, linear interpolation
};

/// V(r) = v0 on [0, R], else 0; rejects v0 <= 0, R <= 0, R >= 1/2.
RadialPotential make_soft_sphere(double v0, double R);

/// Same shape without the R < 1/2 box constraint (free-space / unit-test scaling).
RadialPotential free_soft_sphere(double v0, double R);

/// Piecewise-linear table (r_i, v_i), r strictly increasing, v >= 0, R = r.back().
RadialPotential make_tabulated(const std::vector<double>& r, const std::vector<double>& v);

/// Two-column CSV (radius,value); radii strictly increasing, last radius = R.
RadialPotential load_tabulated_csv(const std::string& path);

/// V identically zero on [0, R]; the free-equation edge case.
RadialPotential zero_potential(double R);

/// V̂(k) = (4π/k) ∫_0^R r V(r) sin(kr) dr, with V̂(0) = 4π ∫ r² V dr.
/// Real, even in k; |V̂(k)| <= V̂(0) for nonnegative V.
double fourier_hat(const RadialPotential& pot, double k);

}  // namespace gpbog
