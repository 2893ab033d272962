#pragma once

#include <cstdint>
#include <vector>

#include "quatkmp/gmm.hpp"
#include "quatkmp/kmp.hpp"
#include "quatkmp/quat.hpp"
#include "quatkmp/types.hpp"

namespace quatkmp::orient {

/// A constraint the adapted trajectory must satisfy: orientation and angular
/// velocity at a time, with the covariance that sets how tightly.
struct DesiredState {
  double time = 0.0;
  quat::UnitQuaternion orientation;
  quat::AngularVelocity angular_velocity = quat::AngularVelocity::Zero();
  Matrix6d cov = 1e-8 * Matrix6d::Identity();
};

/// Fitted time-driven orientation model. Immutable after construction;
/// prediction paths are read-only and thread-safe.
struct Model {
  quat::UnitQuaternion base;  // auxiliary quaternion all samples are projected against
  gmm::GaussianMixture mixture;
  kmp::Model machine;
  double delta_t = 1e-3;  // step used to transform desired angular velocities, s
  kmp::PenaltyOrder penalty = kmp::PenaltyOrder::acceleration;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<quat::UnitQuaternion> quats;
  std::vector<quat::AngularVelocity> omegas;

  std::size_t size() const { return times.size(); }
};

/// One transformed demonstration sample: eta = [zeta; zeta_dot] at a time.
struct TimeSample {
  double time = 0.0;
  Vector6d eta = Vector6d::Zero();
};

/// Projects demos to Euclidean space: zeta = log(q * conj(base)) and
/// zeta_dot by forward differences (the last sample repeats the previous
/// derivative). Demos must already be hemisphere-aligned; throws
/// AlignmentError otherwise and DomainError when a sample reaches the
/// antipode of `base`.
std::vector<TimeSample> transform_demos(const std::vector<quat::QuatDemo>& demos,
                                        const quat::UnitQuaternion& base);

struct LearnOptions {
  int components = 5;
  double lambda = 1.0;
  double lambda_accel = 0.0;  // > 0 enables the smoothness-penalized fit
  kmp::PenaltyOrder penalty = kmp::PenaltyOrder::acceleration;
  int grid_size = 0;  // reference grid density; 0 uses the demo length
  std::uint64_t seed = 0;
  double delta_t = 1e-3;
  gmm::EmOptions em;
};

struct LearnResult {
  Model model;
  std::vector<gmm::RefPoint> reference;
};

/// Full pipeline: transform -> GMM on (t, eta) -> GMR over a uniform time
/// grid spanning the demos -> kernel machine fit (smoothness-penalized when
/// lambda_accel > 0). Returns the model together with the reference
/// trajectory it was fitted on.
LearnResult learn(const std::vector<quat::QuatDemo>& demos,
                  const quat::UnitQuaternion& base,
                  const kmp::KernelSpec& kernel, const LearnOptions& opts);

/// Transforms desired quaternion states into Euclidean desired points:
/// zeta = log(q * conj(base)), and zeta_dot from the one-step-ahead
/// quaternion exp(omega delta_t / 2) * q divided through delta_t.
std::vector<kmp::DesiredPoint> transform_desired(
    const std::vector<DesiredState>& desired, const quat::UnitQuaternion& base,
    double delta_t);

/// Refits the kernel machine on the reference extended with the transformed
/// desired states. The input model is unchanged; the returned result holds
/// the new model and the extended reference.
LearnResult adapt(const Model& model, const std::vector<DesiredState>& desired,
                  const std::vector<gmm::RefPoint>& reference);

/// Predicts eta over `times`, recovers quaternions via exp(zeta) * base, and
/// differentiates consecutive quaternions for the angular velocities (the
/// last entry repeats the previous one). Throws DomainError when a predicted
/// |zeta| reaches pi.
Trajectory rollout(const Model& model, const std::vector<double>& times);

/// Smoothness costs of a trajectory: mean quaternion step norm, mean angular
/// velocity step norm, and mean squared angular acceleration (forward
/// differences). Throws LengthError for trajectories shorter than 3.
struct Metrics {
  double quat_cost = 0.0;   // c_q
  double omega_cost = 0.0;  // c_omega
  double accel_cost = 0.0;  // c_omega_dot
};

Metrics metrics(const Trajectory& traj);

/// Numeric check of the two smoothness theorems: builds the optimal
/// trajectories zeta_n = (n-1) step and zeta_n = (n-1)(n-2) dt step / 2,
/// recovers quaternions, and differentiates numerically.
struct TheoremReport {
  double max_omega_dot = 0.0;      // constant-velocity construction
  double omega_const_error = 0.0;  // max |omega_n - 2 step / dt|
  double max_omega_ddot = 0.0;     // constant-acceleration construction
  double omega_step_error = 0.0;   // max |(omega_{n+1} - omega_n) - 2 step|
};

TheoremReport verify_theorems(const quat::Tangent3& step,
                              const quat::UnitQuaternion& base, int n_steps,
                              double dt);

}  // namespace quatkmp::orient
