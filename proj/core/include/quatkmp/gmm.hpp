#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "quatkmp/errors.hpp"

namespace quatkmp::gmm {

struct GaussianComponent {
  double prior = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Mixture over joint (input, output) vectors. Fitted mixtures are immutable
/// and safe to share across threads.
struct GaussianMixture {
  std::vector<GaussianComponent> components;
  int input_dim = 0;
  int output_dim = 0;

  int dim() const { return input_dim + output_dim; }
};

/// One point of a probabilistic reference trajectory: the conditional output
/// distribution at an input.
struct RefPoint {
  Eigen::VectorXd input;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct EmOptions {
  int max_iter = 200;
  double tol = 1e-8;      // relative log-likelihood improvement stop
  double cov_reg = 1e-6;  // added to every covariance diagonal each M-step
};

/// EM fit of `n_components` Gaussians to `data` (one sample per row,
/// dimension input_dim + output_dim). Initialization is k-means++ with one
/// Lloyd pass, all driven by `seed`. When `loglik_trace` is given, the
/// per-iteration log-likelihood is appended to it.
/// Throws FitError when a component collapses (prior < 1e-8), a covariance
/// stops being positive definite, or data has fewer rows than components.
GaussianMixture fit_em(const Eigen::MatrixXd& data, int input_dim,
                       int n_components, std::uint64_t seed,
                       const EmOptions& opts = {},
                       std::vector<double>* loglik_trace = nullptr);

/// Responsibilities h_c(input) of the mixture components, computed in the
/// log domain; sums to one.
Eigen::VectorXd responsibilities(const GaussianMixture& g,
                                 const Eigen::VectorXd& input);

/// Gaussian mixture regression: conditions the mixture on `input` and
/// moment-matches the mixture of conditionals to a single Gaussian.
/// Throws ConditionError if the result is not finite.
RefPoint condition(const GaussianMixture& g, const Eigen::VectorXd& input);

/// Ancestral sampling from the input marginal: component index with
/// probability prior_c, then a draw from that component's input block.
/// Deterministic for a fixed seed.
std::vector<Eigen::VectorXd> sample_inputs(const GaussianMixture& g, int count,
                                           std::uint64_t seed);

/// condition() mapped over `inputs`, order preserved.
std::vector<RefPoint> build_reference(const GaussianMixture& g,
                                      const std::vector<Eigen::VectorXd>& inputs);

}  // namespace quatkmp::gmm
