#include "mgdm/overlaps.hpp"

#include <cmath>
#include <stdexcept>

#include "mgdm/rng.hpp"

namespace mgdm::overlaps {

namespace {

void check_latents(int n_latents) {
  if (n_latents < 1)
    throw std::invalid_argument("overlap estimate needs n_latents >= 1");
}

double pairwise_sum(const double* x, size_t n) {
  if (n <= 4) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

OverlapEstimate from_samples(OverlapKind kind, const std::vector<double>& v) {
  OverlapEstimate e;
  e.kind = kind;
  e.n_latents = int(v.size());
  e.n_trials = 1;
  size_t n = v.size();
  e.mean = pairwise_sum(v.data(), n) / double(n);
  if (n > 1) {
    std::vector<double> dev(n);
    for (size_t i = 0; i < n; ++i) {
      double d = v[i] - e.mean;
      dev[i] = d * d;
    }
    double var = pairwise_sum(dev.data(), n) / double(n - 1);
    e.std_err = std::sqrt(var / double(n));
  }
  return e;
}

template <typename Derived>
OverlapEstimate eigenvector_overlap(const Eigen::MatrixBase<Derived>& va,
                                    const Eigen::MatrixBase<Derived>& vb,
                                    OverlapKind kind) {
  OverlapEstimate e;
  e.kind = kind;
  e.mean = std::abs(va.dot(vb));
  e.n_latents = 0;
  e.n_trials = 1;
  return e;
}

}  // namespace

OverlapEstimate memorisation_overlap(const linalg::GenerativeModel& model,
                                     const models::Dataset& train,
                                     int n_latents, std::uint64_t seed,
                                     bool subtract_baseline) {
  check_latents(n_latents);
  const auto n = train.samples.rows();
  const auto d = train.samples.cols();
  if (n < 1) throw std::invalid_argument("memorisation_overlap: empty dataset");
  if (d != model.dim())
    throw std::invalid_argument("memorisation_overlap: dimension mismatch");
  Eigen::VectorXd row_norms = train.samples.rowwise().norm();
  rng::Stream stream(seed);
  std::vector<double> values(n_latents);
  for (int t = 0; t < n_latents; ++t) {
    Eigen::VectorXd x = model.generate(stream.gaussian_vector(int(d)));
    double x_norm = x.norm();
    if (x_norm <= 0.0)
      throw std::runtime_error("memorisation_overlap: zero-norm sample");
    Eigen::VectorXd dots = train.samples * x;
    double best = 0.0;
    for (Eigen::Index mu = 0; mu < n; ++mu) {
      if (row_norms(mu) <= 0.0) continue;
      best = std::max(best, std::abs(dots(mu)) / (row_norms(mu) * x_norm));
    }
    values[size_t(t)] = best;
  }
  OverlapEstimate e = from_samples(OverlapKind::m, values);
  if (subtract_baseline)
    e.mean = std::max(
        0.0, e.mean - std::sqrt(2.0 * std::log(double(n)) / double(d)));
  return e;
}

OverlapEstimate convergence_overlap(const linalg::GenerativeModel& model_a,
                                    const linalg::GenerativeModel& model_b,
                                    int n_latents, std::uint64_t seed) {
  check_latents(n_latents);
  if (model_a.dim() != model_b.dim())
    throw std::invalid_argument("convergence_overlap: dimension mismatch");
  rng::Stream stream(seed);
  std::vector<double> values(n_latents);
  for (int t = 0; t < n_latents; ++t) {
    Eigen::VectorXd z = stream.gaussian_vector(int(model_a.dim()));
    Eigen::VectorXd xa = model_a.generate(z);
    Eigen::VectorXd xb = model_b.generate(z);
    double na = xa.norm();
    double nb = xb.norm();
    if (na <= 0.0 || nb <= 0.0)
      throw std::runtime_error("convergence_overlap: zero-norm sample");
    values[size_t(t)] = std::abs(xa.dot(xb)) / (na * nb);
  }
  return from_samples(OverlapKind::q, values);
}

OverlapEstimate subspace_overlap(const linalg::GenerativeModel& model_a,
                                 const linalg::GenerativeModel& model_b) {
  if (model_a.dim() != model_b.dim())
    throw std::invalid_argument("subspace_overlap: dimension mismatch");
  return eigenvector_overlap(model_a.top_eigenpair().vector,
                             model_b.top_eigenpair().vector, OverlapKind::Q);
}

OverlapEstimate rotated_subspace_overlap(const Eigen::MatrixXd& samples_a,
                                         const Eigen::MatrixXd& samples_b,
                                         const Eigen::MatrixXd& basis,
                                         bool center) {
  if (samples_a.cols() != samples_b.cols() ||
      samples_a.cols() != basis.rows())
    throw std::invalid_argument(
        "rotated_subspace_overlap: dimension mismatch");
  Eigen::MatrixXd rot_a = samples_a * basis;
  Eigen::MatrixXd rot_b = samples_b * basis;
  auto top_a = linalg::leading_eigenpair(linalg::correlation_matrix(rot_a, center));
  auto top_b = linalg::leading_eigenpair(linalg::correlation_matrix(rot_b, center));
  return eigenvector_overlap(top_a.vector, top_b.vector, OverlapKind::Qstar);
}

OverlapEstimate rotated_subspace_overlap(const Eigen::MatrixXd& samples_a,
                                         const Eigen::MatrixXd& samples_b,
                                         const Eigen::MatrixXcd& basis,
                                         bool center) {
  if (samples_a.cols() != samples_b.cols() ||
      samples_a.cols() != basis.rows())
    throw std::invalid_argument(
        "rotated_subspace_overlap: dimension mismatch");
  Eigen::MatrixXcd rot_a = samples_a * basis;
  Eigen::MatrixXcd rot_b = samples_b * basis;
  auto top_a = linalg::leading_eigenpair(linalg::correlation_matrix(rot_a, center));
  auto top_b = linalg::leading_eigenpair(linalg::correlation_matrix(rot_b, center));
  OverlapEstimate e;
  e.kind = OverlapKind::Qstar;
  e.mean = std::abs(top_a.vector.dot(top_b.vector));
  e.n_latents = 0;
  e.n_trials = 1;
  return e;
}

double finite_n_memorisation_oracle(std::int64_t n, double sigma_reg,
                                    int n_mc, std::uint64_t seed) {
  if (n < 1)
    throw std::invalid_argument("finite_n_memorisation_oracle: n must be >= 1");
  if (n_mc < 1)
    throw std::invalid_argument(
        "finite_n_memorisation_oracle: n_mc must be >= 1");
  if (!(sigma_reg >= 0.0) || !std::isfinite(sigma_reg))
    throw std::invalid_argument(
        "finite_n_memorisation_oracle: sigma_reg must be >= 0");
  double ns2 = double(n) * sigma_reg * sigma_reg;
  rng::Stream stream(seed);
  std::vector<double> values(static_cast<size_t>(n_mc));
  for (int t = 0; t < n_mc; ++t) {
    double max_abs = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t mu = 0; mu < n; ++mu) {
      double z = stream.gaussian();
      max_abs = std::max(max_abs, std::abs(z));
      sum_sq += z * z;
    }
    values[size_t(t)] = max_abs / std::sqrt(ns2 + sum_sq);
  }
  return pairwise_sum(values.data(), values.size()) / double(n_mc);
}

OverlapEstimate aggregate_trials(const std::vector<OverlapEstimate>& trials) {
  if (trials.empty())
    throw std::invalid_argument("aggregate_trials: no trials");
  std::vector<double> means(trials.size());
  int latents = 0;
  int count = 0;
  for (size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].kind != trials[0].kind)
      throw std::invalid_argument("aggregate_trials: mixed overlap kinds");
    means[i] = trials[i].mean;
    latents += trials[i].n_latents;
    count += trials[i].n_trials;
  }
  OverlapEstimate e = from_samples(trials[0].kind, means);
  e.kind = trials[0].kind;
  e.n_latents = latents;
  e.n_trials = count;
  return e;
}

}  // namespace mgdm::overlaps
