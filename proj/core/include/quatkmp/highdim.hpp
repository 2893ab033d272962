#pragma once

#include <cstdint>
#include <vector>

#include "quatkmp/gmm.hpp"
#include "quatkmp/kmp.hpp"
#include "quatkmp/quat.hpp"
#include "quatkmp/types.hpp"

namespace quatkmp::highdim {

/// A demonstration driven by a varying multi-dimensional input (e.g. a hand
/// position) with full pose outputs.
struct PoseDemo {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::Vector3d> positions;
  std::vector<quat::UnitQuaternion> quats;

  std::size_t size() const { return inputs.size(); }
};

struct DesiredPose {
  Eigen::VectorXd input;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  quat::UnitQuaternion orientation;
  Matrix6d cov = 1e-8 * Matrix6d::Identity();
};

/// Fitted input-driven pose model. Inputs are standardized per dimension
/// (z-score over the demos) before the mixture and the kernel see them.
struct Model {
  quat::UnitQuaternion base;  // identity by default for input-driven models
  gmm::GaussianMixture mixture;
  kmp::Model machine;  // plain 6-D layout over standardized inputs
  Eigen::VectorXd input_shift;
  Eigen::VectorXd input_scale;

  Eigen::VectorXd standardize(const Eigen::VectorXd& input) const {
    return (input - input_shift).cwiseQuotient(input_scale);
  }
};

/// One transformed sample: xi = [p; log(q * conj(base))].
struct PoseSample {
  Eigen::VectorXd input;
  Vector6d pose = Vector6d::Zero();
};

/// Projects pose demos to Euclidean outputs. No derivatives are formed: the
/// input's rate of change is not observable at prediction time.
std::vector<PoseSample> transform_demos(const std::vector<PoseDemo>& demos,
                                        const quat::UnitQuaternion& base);

struct LearnOptions {
  int components = 5;
  double lambda = 2.0;
  int sample_count = 0;  // marginal input draws; 0 uses the demo length
  std::uint64_t seed = 0;
  gmm::EmOptions em;
};

struct LearnResult {
  Model model;
  std::vector<gmm::RefPoint> reference;
};

/// Pipeline for input-driven demos: standardize inputs -> GMM on (s, xi) ->
/// sample the input marginal -> GMR reference -> plain 6-D kernel fit.
/// The kernel must be gaussian (periodic kernels are 1-D only).
LearnResult learn(const std::vector<PoseDemo>& demos,
                  const quat::UnitQuaternion& base,
                  const kmp::KernelSpec& kernel, const LearnOptions& opts);

/// Appends the transformed desired poses to the reference and refits.
LearnResult adapt(const Model& model, const std::vector<DesiredPose>& desired,
                  const std::vector<gmm::RefPoint>& reference);

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  quat::UnitQuaternion orientation;
};

/// Splits the predicted 6-vector into position and quaternion (recovered via
/// the exp map). Pure function of (model, input): identical queries return
/// identical poses. Throws DomainError when the predicted |xi_q| reaches pi.
Pose predict(const Model& model, const Eigen::VectorXd& input);

/// Synthetic handover-style demos: a 3-D hand path drives end-effector
/// position and orientation, all generated from quintic profiles with
/// per-demo perturbations scaled by noise_scale. Deterministic per seed.
std::vector<PoseDemo> generate_handover_demos(int demo_count, int samples,
                                              double noise_scale,
                                              std::uint64_t seed);

}  // namespace quatkmp::highdim
