#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbog {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Precondition violation (CLI maps this to exit code 2).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Iterative method failed to reach its tolerance (CLI maps this to exit code 3).
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integer momentum triple n; the physical momentum is p = 2*pi*n.
struct Int3 {
  int x = 0, y = 0, z = 0;

  long long norm2() const {
    return static_cast<long long>(x) * x + static_cast<long long>(y) * y +
           static_cast<long long>(z) * z;
  }
  double pnorm() const { return kTwoPi * std::sqrt(static_cast<double>(norm2())); }
  double pnorm2() const { return kTwoPi * kTwoPi * static_cast<double>(norm2()); }
  bool is_zero() const { return x == 0 && y == 0 && z == 0; }

  Int3 operator-() const { return {-x, -y, -z}; }
  Int3 operator+(const Int3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Int3 operator-(const Int3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  bool operator==(const Int3& o) const = default;
  // lexicographic, used for deterministic orderings
  bool operator<(const Int3& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
};

/// Neumaier-compensated accumulator; deterministic for a fixed add order.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Lexicographic enumeration of the cube |n_i| <= M with the origin excluded.
template <class F>
void for_cube(int M, F&& fn) {
  for (int x = -M; x <= M; ++x)
    for (int y = -M; y <= M; ++y)
      for (int z = -M; z <= M; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        fn(Int3{x, y, z});
      }
}

/// sin(x)/x with the removable singularity handled by series.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

/// Least-squares slope of log|y| against log(x); used for scaling-law fits.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gpbog
