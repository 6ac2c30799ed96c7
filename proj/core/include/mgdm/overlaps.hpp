#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mgdm/linalg.hpp"
#include "mgdm/models.hpp"

namespace mgdm::overlaps {

enum class OverlapKind { m, q, Q, Qstar };

/// One Monte-Carlo overlap estimate. n_latents is 0 for the eigenvector
/// overlaps Q and Q*, which need no latent draws; their spread comes only
/// from dataset resampling across trials.
struct OverlapEstimate {
  OverlapKind kind = OverlapKind::m;
  double mean = 0.0;
  double std_err = 0.0;
  int n_latents = 0;
  int n_trials = 1;
};

/// Memorisation overlap m: average over latents of the maximal cosine
/// between the generated sample and any training row. The sqrt(2 log n / d)
/// chance baseline is subtracted only when subtract_baseline is set.
OverlapEstimate memorisation_overlap(const linalg::GenerativeModel& model,
                                     const models::Dataset& train,
                                     int n_latents, std::uint64_t seed,
                                     bool subtract_baseline = false);

/// Convergence overlap q: average cosine between the two models' outputs on
/// shared latents.
OverlapEstimate convergence_overlap(const linalg::GenerativeModel& model_a,
                                    const linalg::GenerativeModel& model_b,
                                    int n_latents, std::uint64_t seed);

/// Subspace overlap Q: modulus of the inner product of the two top
/// eigenvectors. Deterministic given the models.
OverlapEstimate subspace_overlap(const linalg::GenerativeModel& model_a,
                                 const linalg::GenerativeModel& model_b);

/// Rotated subspace overlap Q*: project both sample sets onto the columns
/// of `basis`, form each correlation matrix there, and return the modulus
/// of the inner product of the leading eigenvectors. For a PowerLawModel
/// with stored row-frame F this means passing F^T.
OverlapEstimate rotated_subspace_overlap(const Eigen::MatrixXd& samples_a,
                                         const Eigen::MatrixXd& samples_b,
                                         const Eigen::MatrixXd& basis,
                                         bool center = false);

/// Q* with a unitary basis (e.g. a DFT matrix); the correlation matrices
/// are Hermitian and the overlap is a complex modulus.
OverlapEstimate rotated_subspace_overlap(const Eigen::MatrixXd& samples_a,
                                         const Eigen::MatrixXd& samples_b,
                                         const Eigen::MatrixXcd& basis,
                                         bool center = false);

/// Dimension-free finite-n memorisation value: Monte-Carlo estimate of
/// E[max_mu |z_mu| / sqrt(n sigma^2 + sum z_nu^2)] with z iid standard
/// normal. Independent oracle for memorisation_overlap.
double finite_n_memorisation_oracle(std::int64_t n, double sigma_reg,
                                    int n_mc, std::uint64_t seed);

/// Combine per-trial estimates of the same kind: mean of trial means,
/// std_err from the trial-level variance. Uses pairwise summation so the
/// result depends only on the order of the input vector.
OverlapEstimate aggregate_trials(const std::vector<OverlapEstimate>& trials);

}  // namespace mgdm::overlaps
