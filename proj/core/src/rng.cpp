#include "mgdm/rng.hpp"

#include <stdexcept>

namespace mgdm::rng {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t seed = splitmix64(state);
  for (std::uint64_t step : path) {
    state = seed ^ (step + 0x9e3779b97f4a7c15ULL);
    seed = splitmix64(state);
  }
  return seed;
}

Eigen::VectorXd Stream::gaussian_vector(int d) {
  if (d < 1) throw std::invalid_argument("gaussian_vector: d must be >= 1");
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = gaussian();
  return v;
}

Eigen::MatrixXd Stream::gaussian_matrix(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("gaussian_matrix: empty shape");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
  return m;
}

Eigen::VectorXd sphere_point(int d, Stream& stream) {
  Eigen::VectorXd v = stream.gaussian_vector(d);
  double norm = v.norm();
  while (norm == 0.0) {  // probability zero, but keep the contract total
    v = stream.gaussian_vector(d);
    norm = v.norm();
  }
  return v / norm;
}

Eigen::MatrixXd haar_orthogonal(int d, Stream& stream) {
  Eigen::MatrixXd g = stream.gaussian_matrix(d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j)
    if (r_diag(j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace mgdm::rng
