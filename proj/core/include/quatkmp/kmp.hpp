#pragma once

#include <Eigen/Core>
#include <vector>

#include "quatkmp/errors.hpp"
#include "quatkmp/gmm.hpp"

namespace quatkmp::kmp {

/// Scalar kernel over inputs.
///   gaussian: exp(-ell |a - b|^2), any input dimension
///   periodic: exp(-ell sin^2(pi (a - b) / period)), 1-D inputs only
/// `delta` is the finite-difference step used by the derivative blocks.
struct KernelSpec {
  enum class Kind { gaussian, periodic };

  Kind kind = Kind::gaussian;
  double ell = 1.0;
  double period = 0.0;
  double delta = 1e-4;

  static KernelSpec gaussian_kernel(double ell, double delta = 1e-4);
  static KernelSpec periodic_kernel(double ell, double period,
                                    double delta = 1e-4);
};

/// Block structure of the expanded kernel matrix.
///   time_deriv: 6x6 blocks over [zeta; zeta_dot] (1-D time input)
///   time_accel: 9x9 blocks over [zeta; zeta_dot; zeta_ddot]
///   time_jerk:  9x9 blocks over [zeta; zeta_dot; zeta_dddot]
///   plain(D):   k(a, b) * I_D (any input dimension, no derivative coupling)
struct BlockLayout {
  enum class Kind { time_deriv, time_accel, time_jerk, plain };

  Kind kind = Kind::plain;
  int out_dim = 0;

  static BlockLayout time_deriv() { return {Kind::time_deriv, 6}; }
  static BlockLayout time_accel() { return {Kind::time_accel, 9}; }
  static BlockLayout time_jerk() { return {Kind::time_jerk, 9}; }
  static BlockLayout plain(int dim);

  /// Derivative orders stacked in this layout (empty for plain).
  std::vector<int> derivative_orders() const;
};

/// Scalar kernel value in (0, 1].
/// Throws LayoutError when a periodic kernel is given multi-dimensional input.
double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);

/// Forward-difference derivative entry of the kernel,
///   (Delta_i^p Delta_j^q k)(ti, tj) / delta^(p+q),
/// the order-(p,q) generalization of the 6x6 and 9x9 block formulas. The
/// stencil is evaluated in extended precision: at the default delta the
/// third- and fourth-order differences cancel below double resolution.
double kernel_fd(const KernelSpec& spec, int order_i, int order_j, double ti,
                 double tj);

/// Expanded kernel block for the layout. Time layouts require 1-D inputs.
Eigen::MatrixXd kernel_block(const KernelSpec& spec, const BlockLayout& layout,
                             const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b);

/// A desired point in the transformed output space with the covariance that
/// sets its adaptation precision.
struct DesiredPoint {
  Eigen::VectorXd input;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Fitted kernel machine: everything needed to evaluate
/// k*(K + lambda Sigma)^{-1} mu at new queries.
struct Model {
  std::vector<Eigen::VectorXd> train_inputs;
  KernelSpec kernel;
  BlockLayout layout;
  double lambda = 1.0;
  double lambda_accel = 0.0;  // 0 when no smoothness penalty was used
  Eigen::VectorXd dual_coeffs;
};

/// Covariance-weighted kernel ridge fit over the reference trajectory:
/// assembles the Gram matrix of `layout` blocks, the block-diagonal
/// covariance and the stacked means, and solves (K + lambda Sigma) x = mu by
/// Cholesky factorization (pivoted fallback).
/// Throws SolveError when the system is numerically singular (condition
/// estimate above 1e14) and DimError on mismatched reference dimensions.
Model fit(const std::vector<gmm::RefPoint>& reference, const KernelSpec& spec,
          const BlockLayout& layout, double lambda);

enum class PenaltyOrder { acceleration, jerk };

/// Fit with a derivative-magnitude penalty of weight lambda_accel: each
/// 6-dim reference point is augmented to [mean; 0] with covariance
/// blockdiag(cov, (1/lambda_accel) I3) and fitted under the matching
/// 9x9 layout (acceleration or jerk rows).
Model fit_constrained(const std::vector<gmm::RefPoint>& reference,
                      const KernelSpec& spec, double lambda,
                      double lambda_accel,
                      PenaltyOrder order = PenaltyOrder::acceleration);

/// Row of kernel blocks at `query` times the dual coefficients. Returns the
/// full stacked output of the layout ([zeta; zeta_dot], [zeta; zeta_dot;
/// zeta_ddot], or the plain D-vector).
Eigen::VectorXd predict(const Model& model, const Eigen::VectorXd& query);

/// Concatenates the reference with the desired points (reference order
/// first, then desired). Throws DimError on mismatched output dimensions.
std::vector<gmm::RefPoint> extend_reference(
    const std::vector<gmm::RefPoint>& reference,
    const std::vector<DesiredPoint>& desired);

}  // namespace quatkmp::kmp
