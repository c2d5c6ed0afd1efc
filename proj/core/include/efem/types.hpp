// Shared small types: fixed-size vectors/matrices, the quadrature rule used
// by all assembly routines, and the reproducible random number generator.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace efem {

template <int d>
using Vec = Eigen::Matrix<double, d, 1>;
template <int d>
using Mat = Eigen::Matrix<double, d, d>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Three-point Gauss rule on [0,1]; exact for polynomials of degree 5.
// One rule everywhere keeps the discrete transport identities consistent.
struct GaussRule3 {
  static constexpr int n = 3;
  static constexpr double off = 0.3872983346207417;  // sqrt(3/20)
  static constexpr std::array<double, 3> points{0.5 - off, 0.5, 0.5 + off};
  static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0,
                                                 5.0 / 18.0};
};

// 64-bit linear congruential generator (MMIX multiplier/increment).
// All randomized tests and trajectory draws go through this so results are
// reproducible bit-for-bit across platforms and worker counts.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
    return state_;
  }

  // Uniform in [0,1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo,hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

}  // namespace efem
