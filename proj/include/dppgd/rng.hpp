#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace dppgd {

// splitmix64 finalizer; used to decorrelate seeds derived from (seed, tag)
// pairs without consuming draws from the streams themselves.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed derivation: stream `tag` of master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

// Deterministic random stream.  std::mt19937_64 has a standard-specified
// output sequence, and the transforms below avoid std::*_distribution
// adapters (whose algorithms are implementation-defined), so a given seed
// produces the same draws on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on (0, 1]; strictly positive so log() below is always finite.
  double uniform01() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Uniform on the solid l2-ball of the given radius: normalized Gaussian
  // direction scaled by radius * U^(1/n).
  Eigen::VectorXd uniform_ball(int n, double radius) {
    Eigen::VectorXd dir = normal_vector(n);
    double norm = dir.norm();
    if (norm == 0.0) {  // measure-zero; keep the stream well-defined anyway
      dir.setZero();
      dir[0] = 1.0;
      norm = 1.0;
    }
    const double scale =
        radius * std::pow(uniform01(), 1.0 / static_cast<double>(n)) / norm;
    return dir * scale;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dppgd
