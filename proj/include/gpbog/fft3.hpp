#pragma once

#include <complex>
#include <vector>

#include "gpbog/common.hpp"

namespace gpbog {

/// In-place radix-2 complex FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Cube-indexed real field on {-M..M}^3, flat storage, deterministic layout.
struct CubeField {
  int M = 0;
  std::vector<double> v;  // size (2M+1)^3

  explicit CubeField(int M_) : M(M_), v(static_cast<std::size_t>(2 * M_ + 1) * (2 * M_ + 1) * (2 * M_ + 1), 0.0) {}
  std::size_t idx(const Int3& n) const {
    int L = 2 * M + 1;
    return (static_cast<std::size_t>(n.x + M) * L + (n.y + M)) * L + (n.z + M);
  }
  double& at(const Int3& n) { return v[idx(n)]; }
  double at(const Int3& n) const { return v[idx(n)]; }
  bool contains(const Int3& n) const {
    return std::abs(n.x) <= M && std::abs(n.y) <= M && std::abs(n.z) <= M;
  }
};

/// Linear convolution (kernel * field)(p) = sum_q kernel(p - q) field(q) for
/// p, q in the field cube. `kernel` must be provided on the difference cube
/// of radius 2M (kernel.M == 2 * field.M). Exact up to FFT roundoff.
CubeField convolve_cube(const CubeField& kernel, const CubeField& field);

}  // namespace gpbog
