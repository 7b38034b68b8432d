#include "gpbog/fft3.hpp"

#include <cmath>

namespace gpbog {

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw ValidationError("fft_pow2: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> t = a[i + j + len / 2] * w;
        a[i + j] = u + t;
        a[i + j + len / 2] = u - t;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& z : a) z /= static_cast<double>(n);
  }
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// 3D FFT on an S^3 complex grid, separable dimension passes.
void fft3_inplace(std::vector<std::complex<double>>& a, std::size_t S, bool inverse) {
  std::vector<std::complex<double>> line(S);
  // z lines
  for (std::size_t x = 0; x < S; ++x)
    for (std::size_t y = 0; y < S; ++y) {
      std::size_t base = (x * S + y) * S;
      for (std::size_t z = 0; z < S; ++z) line[z] = a[base + z];
      fft_pow2(line, inverse);
      for (std::size_t z = 0; z < S; ++z) a[base + z] = line[z];
    }
  // y lines
  for (std::size_t x = 0; x < S; ++x)
    for (std::size_t z = 0; z < S; ++z) {
      for (std::size_t y = 0; y < S; ++y) line[y] = a[(x * S + y) * S + z];
      fft_pow2(line, inverse);
      for (std::size_t y = 0; y < S; ++y) a[(x * S + y) * S + z] = line[y];
    }
  // x lines
  for (std::size_t y = 0; y < S; ++y)
    for (std::size_t z = 0; z < S; ++z) {
      for (std::size_t x = 0; x < S; ++x) line[x] = a[(x * S + y) * S + z];
      fft_pow2(line, inverse);
      for (std::size_t x = 0; x < S; ++x) a[(x * S + y) * S + z] = line[x];
    }
}

}  // namespace

CubeField convolve_cube(const CubeField& kernel, const CubeField& field) {
  const int M = field.M;
  if (kernel.M != 2 * M)
    throw ValidationError("convolve_cube: kernel cube must have radius 2*M");
  // Zero-padded circular convolution. Full linear support would need 6M+1
  // samples, but the result is only read on |p| <= M (raw offsets 2M..4M);
  // wrapped images land there only if S <= 4M, so S >= 4M+1 is alias-free
  // on the read region.
  const std::size_t S = next_pow2(static_cast<std::size_t>(4 * M + 1));
  if (S > 256)
    throw ValidationError("convolve_cube: grid half-width too large (memory guard)");
  std::vector<std::complex<double>> A(S * S * S), B(S * S * S);

  const int Lf = 2 * M + 1, Lk = 4 * M + 1;
  for (int x = 0; x < Lf; ++x)
    for (int y = 0; y < Lf; ++y)
      for (int z = 0; z < Lf; ++z)
        A[(static_cast<std::size_t>(x) * S + y) * S + z] =
            field.v[(static_cast<std::size_t>(x) * Lf + y) * Lf + z];
  for (int x = 0; x < Lk; ++x)
    for (int y = 0; y < Lk; ++y)
      for (int z = 0; z < Lk; ++z)
        B[(static_cast<std::size_t>(x) * S + y) * S + z] =
            kernel.v[(static_cast<std::size_t>(x) * Lk + y) * Lk + z];

  fft3_inplace(A, S, false);
  fft3_inplace(B, S, false);
  for (std::size_t i = 0; i < A.size(); ++i) A[i] *= B[i];
  fft3_inplace(A, S, true);

  // Result at p in {-M..M}^3 sits at offset p + M (field) + 2M (kernel) = p + 3M.
  CubeField out(M);
  for (int x = -M; x <= M; ++x)
    for (int y = -M; y <= M; ++y)
      for (int z = -M; z <= M; ++z)
        out.at({x, y, z}) =
            A[((static_cast<std::size_t>(x + 3 * M)) * S + (y + 3 * M)) * S + (z + 3 * M)].real();
  return out;
}

}  // namespace gpbog
