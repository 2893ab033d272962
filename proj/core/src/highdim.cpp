#include "quatkmp/highdim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "quatkmp/rng.hpp"

namespace quatkmp::highdim {

namespace {

void check_demos(const std::vector<PoseDemo>& demos) {
  for (std::size_t m = 0; m < demos.size(); ++m) {
    const PoseDemo& demo = demos[m];
    if (demo.positions.size() != demo.size() || demo.quats.size() != demo.size()) {
      throw DimError("pose demo " + std::to_string(m) + " has mismatched lengths");
    }
    for (std::size_t n = 1; n < demo.size(); ++n) {
      if (demo.quats[n - 1].dot(demo.quats[n]) <= 0.0) {
        throw AlignmentError("pose demo " + std::to_string(m) +
                             " crosses hemispheres at step " + std::to_string(n));
      }
    }
  }
}

}  // namespace

std::vector<PoseSample> transform_demos(const std::vector<PoseDemo>& demos,
                                        const quat::UnitQuaternion& base) {
  check_demos(demos);
  std::vector<PoseSample> samples;
  for (const PoseDemo& demo : demos) {
    for (std::size_t n = 0; n < demo.size(); ++n) {
      PoseSample sample;
      sample.input = demo.inputs[n];
      sample.pose.head<3>() = demo.positions[n];
      sample.pose.tail<3>() =
          quat::log_map(quat::product(demo.quats[n], quat::conjugate(base)));
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

LearnResult learn(const std::vector<PoseDemo>& demos,
                  const quat::UnitQuaternion& base,
                  const kmp::KernelSpec& kernel, const LearnOptions& opts) {
  if (demos.empty() || demos.front().size() == 0) {
    throw DimError("need at least one non-empty demonstration");
  }
  const std::vector<PoseSample> samples = transform_demos(demos, base);
  const int input_dim = static_cast<int>(samples.front().input.size());
  if (kernel.kind == kmp::KernelSpec::Kind::periodic && input_dim != 1) {
    throw LayoutError("periodic kernels take 1-D inputs");
  }

  Eigen::MatrixXd inputs(samples.size(), input_dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].input.size() != input_dim) {
      throw DimError("demo inputs have mixed dimensions");
    }
    inputs.row(i) = samples[i].input.transpose();
  }

  LearnResult result;
  Model& model = result.model;
  model.base = base;
  model.input_shift = inputs.colwise().mean();
  model.input_scale = ((inputs.rowwise() - model.input_shift.transpose())
                           .array()
                           .square()
                           .colwise()
                           .mean())
                          .sqrt()
                          .matrix()
                          .cwiseMax(1e-12);

  Eigen::MatrixXd data(samples.size(), input_dim + 6);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    data.row(i).head(input_dim) =
        model.standardize(samples[i].input).transpose();
    data.row(i).tail<6>() = samples[i].pose.transpose();
  }
  model.mixture = gmm::fit_em(data, input_dim, opts.components, opts.seed, opts.em);

  const int draws = opts.sample_count > 0
                        ? opts.sample_count
                        : static_cast<int>(demos.front().size());
  const std::vector<Eigen::VectorXd> grid =
      gmm::sample_inputs(model.mixture, draws, opts.seed + 1);
  result.reference = gmm::build_reference(model.mixture, grid);

  model.machine = kmp::fit(result.reference, kernel, kmp::BlockLayout::plain(6),
                           opts.lambda);
  return result;
}

LearnResult adapt(const Model& model, const std::vector<DesiredPose>& desired,
                  const std::vector<gmm::RefPoint>& reference) {
  std::vector<kmp::DesiredPoint> points;
  points.reserve(desired.size());
  for (const DesiredPose& pose : desired) {
    kmp::DesiredPoint point;
    point.input = model.standardize(pose.input);
    point.mean = Eigen::VectorXd(6);
    point.mean.head<3>() = pose.position;
    point.mean.tail<3>() = quat::log_map(
        quat::product(pose.orientation, quat::conjugate(model.base)));
    point.cov = pose.cov;
    points.push_back(std::move(point));
  }
  LearnResult result;
  result.reference = kmp::extend_reference(reference, points);
  result.model = model;
  result.model.machine =
      kmp::fit(result.reference, model.machine.kernel,
               kmp::BlockLayout::plain(6), model.machine.lambda);
  return result;
}

Pose predict(const Model& model, const Eigen::VectorXd& input) {
  const Eigen::VectorXd xi =
      kmp::predict(model.machine, model.standardize(input));
  const Eigen::Vector3d quat_part = xi.tail<3>();
  if (quat_part.norm() >= std::numbers::pi) {
    throw DomainError("predicted |xi_q| = " + std::to_string(quat_part.norm()) +
                      " >= pi");
  }
  Pose pose;
  pose.position = xi.head<3>();
  pose.orientation = quat::product(quat::exp_map(quat_part), model.base);
  return pose;
}

std::vector<PoseDemo> generate_handover_demos(int demo_count, int samples,
                                              double noise_scale,
                                              std::uint64_t seed) {
  if (demo_count < 1 || samples < 2) {
    throw DimError("need demo_count >= 1 and samples >= 2");
  }
  const Eigen::Vector3d hand_start(0.65, -0.35, 0.15);
  const Eigen::Vector3d hand_goal(0.35, 0.25, 0.45);
  const Eigen::Vector3d robot_start(0.30, 0.00, 0.30);
  const Eigen::Vector3d handover_offset(0.00, -0.05, 0.05);
  const Eigen::Vector3d orient_goal(0.9, -0.4, 0.3);

  const auto blend = [](double tau) {
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
  };

  Rng rng(seed);
  std::vector<PoseDemo> demos(demo_count);
  for (int m = 0; m < demo_count; ++m) {
    Eigen::Vector3d start_jitter, goal_jitter;
    Eigen::Matrix3d hand_wave, robot_wave, orient_wave;
    for (int i = 0; i < 3; ++i) {
      start_jitter[i] = noise_scale * rng.normal();
      goal_jitter[i] = noise_scale * rng.normal();
      for (int k = 0; k < 3; ++k) {
        hand_wave(i, k) = noise_scale * rng.normal() / (k + 1);
        robot_wave(i, k) = 0.5 * noise_scale * rng.normal() / (k + 1);
        orient_wave(i, k) = 0.5 * noise_scale * rng.normal() / (k + 1);
      }
    }
    const Eigen::Vector3d h0 = hand_start + start_jitter;
    const Eigen::Vector3d h1 = hand_goal + goal_jitter;

    PoseDemo& demo = demos[m];
    demo.inputs.reserve(samples);
    demo.positions.reserve(samples);
    demo.quats.reserve(samples);
    for (int n = 0; n < samples; ++n) {
      const double tau = static_cast<double>(n) / (samples - 1);
      const double h = blend(tau);
      Eigen::Vector3d wave = Eigen::Vector3d::Zero();
      Eigen::Vector3d robot_noise = Eigen::Vector3d::Zero();
      Eigen::Vector3d orient_noise = Eigen::Vector3d::Zero();
      for (int k = 0; k < 3; ++k) {
        const double s = std::sin((k + 1) * std::numbers::pi * tau);
        wave += hand_wave.col(k) * s;
        robot_noise += robot_wave.col(k) * s;
        orient_noise += orient_wave.col(k) * s;
      }
      const Eigen::Vector3d hand = h0 + h * (h1 - h0) + wave;
      demo.inputs.push_back(hand);
      demo.positions.push_back(robot_start +
                               h * (h1 + handover_offset - robot_start) +
                               robot_noise);
      demo.quats.push_back(quat::exp_map(h * orient_goal + orient_noise));
    }
  }
  return demos;
}

}  // namespace quatkmp::highdim
