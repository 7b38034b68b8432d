#include "gpbog/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gpbog/quadrature.hpp"

namespace gpbog {

double RadialPotential::operator()(double r) const {
  if (r < 0.0) throw ValidationError("potential: radius must be >= 0");
  if (r > R_) return 0.0;
  if (kind_ == PotentialKind::SoftSphere) return v0_;
  // linear interpolation; table starts at tr_.front() (constant extension to 0)
  if (r <= tr_.front()) return tv_.front();
  auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - tr_.begin());
  if (i >= tr_.size()) return tv_.back();
  double t = (r - tr_[i - 1]) / (tr_[i] - tr_[i - 1]);
  return tv_[i - 1] + t * (tv_[i] - tv_[i - 1]);
}

bool RadialPotential::is_zero() const {
  if (kind_ == PotentialKind::SoftSphere) return v0_ == 0.0;
  return std::all_of(tv_.begin(), tv_.end(), [](double v) { return v == 0.0; });
}

double RadialPotential::integral() const {
  if (kind_ == PotentialKind::SoftSphere) return 4.0 * kPi / 3.0 * R_ * R_ * R_ * v0_;
  const RadialPotential& self = *this;
  return gl_adaptive_panels([&](double r) { return 4.0 * kPi * r * r * self(r); }, 0.0, R_,
                            breakpoints());
}

std::vector<double> RadialPotential::breakpoints() const {
  if (kind_ == PotentialKind::SoftSphere) return {R_};
  return tr_;
}

RadialPotential free_soft_sphere(double v0, double R) {
  if (v0 <= 0.0) throw ValidationError("make_soft_sphere: v0 must be positive");
  if (R <= 0.0) throw ValidationError("make_soft_sphere: R must be positive");
  RadialPotential p;
  p.kind_ = PotentialKind::SoftSphere;
  p.v0_ = v0;
  p.R_ = R;
  return p;
}

RadialPotential make_soft_sphere(double v0, double R) {
  if (R >= 0.5)
    throw ValidationError("make_soft_sphere: support radius must satisfy R < 1/2 (box constraint)");
  return free_soft_sphere(v0, R);
}

RadialPotential make_tabulated(const std::vector<double>& r, const std::vector<double>& v) {
  if (r.size() != v.size() || r.empty())
    throw ValidationError("make_tabulated: need matching nonempty radius/value columns");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (v[i] < 0.0) throw ValidationError("make_tabulated: values must be >= 0");
    if (r[i] <= 0.0) throw ValidationError("make_tabulated: radii must be positive");
    if (i > 0 && r[i] <= r[i - 1])
      throw ValidationError("make_tabulated: radii must be strictly increasing");
  }
  RadialPotential p;
  p.kind_ = PotentialKind::Tabulated;
  p.R_ = r.back();
  p.tr_ = r;
  p.tv_ = v;
  return p;
}

RadialPotential load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_tabulated_csv: cannot open " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) throw ValidationError("load_tabulated_csv: malformed line: " + line);
    r.push_back(a);
    v.push_back(b);
  }
  return make_tabulated(r, v);
}

RadialPotential zero_potential(double R) {
  if (R <= 0.0) throw ValidationError("zero_potential: R must be positive");
  RadialPotential p;
  p.kind_ = PotentialKind::Tabulated;
  p.R_ = R;
  p.tr_ = {R / 2.0, R};
  p.tv_ = {0.0, 0.0};
  return p;
}

double fourier_hat(const RadialPotential& pot, double k) {
  if (k < 0.0) throw ValidationError("fourier_hat: k must be >= 0 (radial transform)");
  if (pot.support_radius() <= 0.0) return 0.0;
  double R = pot.support_radius();
  // (4pi/k) int r V sin(kr) dr == 4pi int r^2 V sinc(kr) dr, stable for all k.
  return gl_adaptive_panels(
      [&](double r) { return 4.0 * kPi * r * r * pot(r) * sinc(k * r); }, 0.0, R,
      pot.breakpoints());
}

}  // namespace gpbog
