#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "quatkmp/errors.hpp"
#include "quatkmp/highdim.hpp"
#include "quatkmp/kmp.hpp"
#include "quatkmp/orient.hpp"
#include "quatkmp/quat.hpp"

namespace quatkmp::cli {

class ConfigError : public Error {
public:
  using Error::Error;
};

enum class Mode { time, time_accel, rhythmic, highdim };

std::string mode_name(Mode mode);

struct DemoConfig {
  std::vector<quat::UnitQuaternion> keys;  // defaults set in load_config
  double duration = 10.0;
  int samples = 1000;
  int count = 5;
  double noise_scale = 0.04;
};

struct HighdimDemoConfig {
  int samples = 400;
  int count = 5;
  double noise_scale = 0.02;
};

struct RolloutConfig {
  double start = 0.0;
  double stop = 10.0;
  int samples = 1000;
};

struct TheoremConfig {
  quat::Tangent3 step{0.01, 0.0, 0.0};
  int steps = 50;
  double dt = 0.01;
};

struct RunConfig {
  Mode mode = Mode::time;
  kmp::KernelSpec kernel = kmp::KernelSpec::gaussian_kernel(0.01);
  double lambda = 1.0;
  double lambda_accel = 0.0;
  kmp::PenaltyOrder penalty = kmp::PenaltyOrder::acceleration;
  int components = 5;
  int grid_n = 0;
  int sample_n = 0;
  std::uint64_t seed = 1;
  std::optional<quat::UnitQuaternion> base_quat;
  double delta_t = 1e-3;
  DemoConfig demo;
  HighdimDemoConfig highdim_demo;
  RolloutConfig rollout;
  TheoremConfig theorem;
  std::vector<orient::DesiredState> desired_points;
  std::vector<highdim::DesiredPose> desired_poses;
  std::vector<double> sweep_lambda_accel = {1e1, 1e2, 1e3, 1e4, 1e5};
};

/// Parses and validates a JSON run configuration.
/// Throws ConfigError with a field-level diagnostic on malformed input.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace quatkmp::cli
