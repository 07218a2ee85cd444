#pragma once

#include <cstdint>
#include <random>

#include "opmap/algebra.hpp"

namespace opmap {

// Per-trial stream seed: seed XOR trial index.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return seed ^ trial; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  int uniform_int(int lo, int hi);  // inclusive
  double normal();
  cd complex_normal();  // E|z|^2 = 1

  Mat gaussian(int rows, int cols, bool real = false);
  Mat unitary(int d);
  // rows x cols with orthonormal columns (cols <= rows).
  Mat isometry(int rows, int cols);
  // G G* with G of size d x rank; rank <= 0 draws it uniformly from [1, d].
  Mat psd(int d, int rank = 0, bool real = false);

  // Random elements normalized to norm 1.
  Element gaussian(const Shape& s, bool real = false);
  Element hermitian(const Shape& s, bool real = false);
  Element psd(const Shape& s, bool real = false);
  Element unitary(const Shape& s);
  // PSD with total trace one across blocks.
  Element density(const Shape& s, bool full_rank = true);

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace opmap
