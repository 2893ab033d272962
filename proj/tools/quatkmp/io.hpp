#pragma once

#include <string>
#include <vector>

#include "quatkmp/config.hpp"
#include "quatkmp/gmm.hpp"
#include "quatkmp/highdim.hpp"
#include "quatkmp/orient.hpp"
#include "quatkmp/quat.hpp"

namespace quatkmp::cli {

class IoError : public Error {
public:
  using Error::Error;
};

/// A trained model plus the reference trajectory needed to re-adapt it.
struct StoredModel {
  Mode mode = Mode::time;
  orient::Model time_model;    // modes time / time_accel / rhythmic
  highdim::Model pose_model;   // mode highdim
  std::vector<gmm::RefPoint> reference;
};

// Time-driven demo files: CSV with header demo,t,qw,qx,qy,qz.
void write_time_demos(const std::string& path,
                      const std::vector<quat::QuatDemo>& demos);
std::vector<quat::QuatDemo> read_time_demos(const std::string& path);

// Input-driven demo files: CSV with header demo,s0..s{I-1},px,py,pz,qw..qz.
void write_pose_demos(const std::string& path,
                      const std::vector<highdim::PoseDemo>& demos);
std::vector<highdim::PoseDemo> read_pose_demos(const std::string& path);

// Trajectory files. Time-driven rows carry t, quaternion, angular velocity
// and the transformed coordinates zeta.
struct TimeTrajectoryFile {
  std::vector<double> times;
  std::vector<quat::UnitQuaternion> quats;
  std::vector<quat::AngularVelocity> omegas;
  std::vector<quat::Tangent3> zetas;
};

void write_time_trajectory(const std::string& path,
                           const TimeTrajectoryFile& traj, bool as_json);
TimeTrajectoryFile read_time_trajectory(const std::string& path);

struct PoseTrajectoryFile {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::Vector3d> positions;
  std::vector<quat::UnitQuaternion> quats;
};

void write_pose_trajectory(const std::string& path,
                           const PoseTrajectoryFile& traj, bool as_json);
PoseTrajectoryFile read_pose_trajectory(const std::string& path);

// Inputs file for highdim rollouts: CSV with header s0..s{I-1}.
std::vector<Eigen::VectorXd> read_inputs_csv(const std::string& path);

void save_model(const std::string& path, const StoredModel& model);
StoredModel load_model(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace quatkmp::cli
