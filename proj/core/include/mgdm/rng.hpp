#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mgdm::rng {

// Derives a child seed from a master seed and a stream path, e.g.
// derive_seed(master, {gamma_index, trial_index}). Uses splitmix64 mixing so
// nearby paths give statistically independent streams; the same (master, path)
// always yields the same seed, which keeps parallel trials replayable.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

// A seeded random stream. All randomness in the library flows through this
// class so results are reproducible byte-for-byte.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}
  Stream(std::uint64_t master, std::initializer_list<std::uint64_t> path)
      : gen_(derive_seed(master, path)) {}

  double gaussian() { return normal_(gen_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  // Filled row by row (sample by sample).
  Eigen::VectorXd gaussian_vector(int d);
  Eigen::MatrixXd gaussian_matrix(int rows, int cols);

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
};

// Uniformly distributed point on the unit sphere in R^d.
Eigen::VectorXd sphere_point(int d, Stream& stream);

// Haar-distributed orthogonal matrix: QR of a square Gaussian matrix with the
// signs of Q's columns fixed so diag(R) > 0, which makes the factor unique.
Eigen::MatrixXd haar_orthogonal(int d, Stream& stream);

}  // namespace mgdm::rng
