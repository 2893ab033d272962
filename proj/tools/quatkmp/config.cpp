#include "quatkmp/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace quatkmp::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

double number_at(const json& node, const std::string& origin,
                 const std::string& field, double fallback,
                 bool required = false) {
  if (!node.contains(field)) {
    if (required) fail(origin, "missing field '" + field + "'");
    return fallback;
  }
  if (!node[field].is_number()) {
    fail(origin, "field '" + field + "' must be a number");
  }
  return node[field].get<double>();
}

Eigen::VectorXd vector_at(const json& node, const std::string& origin,
                          const std::string& field, int expected_size) {
  if (!node.contains(field) || !node[field].is_array()) {
    fail(origin, "field '" + field + "' must be an array");
  }
  const auto& arr = node[field];
  if (expected_size >= 0 && static_cast<int>(arr.size()) != expected_size) {
    fail(origin, "field '" + field + "' must have " +
                     std::to_string(expected_size) + " entries");
  }
  Eigen::VectorXd out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      fail(origin, "field '" + field + "' must contain numbers");
    }
    out[i] = arr[i].get<double>();
  }
  return out;
}

quat::UnitQuaternion quat_at(const json& node, const std::string& origin,
                             const std::string& field) {
  const Eigen::VectorXd q = vector_at(node, origin, field, 4);
  return quat::UnitQuaternion(q[0], q.tail<3>());
}

Matrix6d covariance_at(const json& node, const std::string& origin) {
  if (node.contains("cov")) {
    const auto& rows = node["cov"];
    if (!rows.is_array() || rows.size() != 6) {
      fail(origin, "field 'cov' must be a 6x6 array");
    }
    Matrix6d cov;
    for (int i = 0; i < 6; ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || row.size() != 6) {
        fail(origin, "field 'cov' must be a 6x6 array");
      }
      for (int j = 0; j < 6; ++j) cov(i, j) = row[j].get<double>();
    }
    return cov;
  }
  const double sigma = number_at(node, origin, "sigma", 1e-8);
  if (!(sigma > 0.0)) fail(origin, "field 'sigma' must be positive");
  return sigma * Matrix6d::Identity();
}

Mode parse_mode(const json& root, const std::string& origin) {
  const std::string name = root.value("mode", std::string("time"));
  if (name == "time") return Mode::time;
  if (name == "time_accel") return Mode::time_accel;
  if (name == "rhythmic") return Mode::rhythmic;
  if (name == "highdim") return Mode::highdim;
  fail(origin, "unknown mode '" + name + "'");
}

kmp::KernelSpec parse_kernel(const json& root, Mode mode,
                             const std::string& origin) {
  const bool rhythmic = mode == Mode::rhythmic;
  std::string type = rhythmic ? "periodic" : "gaussian";
  double ell = mode == Mode::highdim ? 1.0 : (rhythmic ? 0.4 : 0.01);
  double period = 10.0;
  double delta = 1e-4;
  if (root.contains("kernel")) {
    const auto& node = root["kernel"];
    if (!node.is_object()) fail(origin, "field 'kernel' must be an object");
    type = node.value("type", type);
    ell = number_at(node, origin + ".kernel", "ell", ell);
    period = number_at(node, origin + ".kernel", "period", period);
    delta = number_at(node, origin + ".kernel", "delta", delta);
  }
  if (type != "gaussian" && type != "periodic") {
    fail(origin, "kernel type must be 'gaussian' or 'periodic'");
  }
  if (rhythmic && type != "periodic") {
    fail(origin, "rhythmic mode requires the periodic kernel");
  }
  if (mode == Mode::highdim && type != "gaussian") {
    fail(origin, "highdim mode requires the gaussian kernel");
  }
  if (!(ell > 0.0) || !(delta > 0.0)) {
    fail(origin, "kernel needs ell > 0 and delta > 0");
  }
  if (type == "periodic" && !(period > 0.0)) {
    fail(origin, "periodic kernel needs period > 0");
  }
  return type == "gaussian" ? kmp::KernelSpec::gaussian_kernel(ell, delta)
                            : kmp::KernelSpec::periodic_kernel(ell, period, delta);
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::time:
      return "time";
    case Mode::time_accel:
      return "time_accel";
    case Mode::rhythmic:
      return "rhythmic";
    case Mode::highdim:
      return "highdim";
  }
  return "time";
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    fail(origin, err.what());
  }
  if (!root.is_object()) fail(origin, "top-level JSON must be an object");

  RunConfig config;
  config.mode = parse_mode(root, origin);
  config.kernel = parse_kernel(root, config.mode, origin);

  const double default_lambda =
      config.mode == Mode::rhythmic ? 10.0
      : config.mode == Mode::highdim ? 2.0
                                     : 1.0;
  config.lambda = number_at(root, origin, "lambda", default_lambda);
  config.lambda_accel = number_at(root, origin, "lambda_a",
                                  config.mode == Mode::time_accel ? 1e3 : 0.0);
  if (!(config.lambda > 0.0)) fail(origin, "'lambda' must be positive");
  if (config.lambda_accel < 0.0) fail(origin, "'lambda_a' must be >= 0");
  if (config.mode == Mode::time_accel && config.lambda_accel == 0.0) {
    fail(origin, "time_accel mode needs 'lambda_a' > 0");
  }

  const std::string penalty = root.value("penalty", std::string("acceleration"));
  if (penalty == "acceleration") {
    config.penalty = kmp::PenaltyOrder::acceleration;
  } else if (penalty == "jerk") {
    config.penalty = kmp::PenaltyOrder::jerk;
  } else {
    fail(origin, "'penalty' must be 'acceleration' or 'jerk'");
  }

  config.components = static_cast<int>(number_at(root, origin, "components", 5));
  config.grid_n = static_cast<int>(number_at(root, origin, "grid_n", 0));
  config.sample_n = static_cast<int>(number_at(root, origin, "sample_n", 0));
  config.seed =
      static_cast<std::uint64_t>(number_at(root, origin, "seed", 1));
  config.delta_t = number_at(root, origin, "delta_t", 1e-3);
  if (config.components < 1) fail(origin, "'components' must be >= 1");
  if (!(config.delta_t > 0.0)) fail(origin, "'delta_t' must be positive");

  if (root.contains("q_a")) {
    config.base_quat = quat_at(root, origin, "q_a");
  }

  config.demo.keys = {
      quat::identity_quat(),
      quat::exp_map(quat::Tangent3(0.35, -0.2, 0.28))};
  if (root.contains("demo")) {
    const auto& node = root["demo"];
    const std::string demo_origin = origin + ".demo";
    if (!node.is_object()) fail(origin, "field 'demo' must be an object");
    config.demo.duration = number_at(node, demo_origin, "duration", 10.0);
    config.demo.samples =
        static_cast<int>(number_at(node, demo_origin, "samples", 1000));
    config.demo.count =
        static_cast<int>(number_at(node, demo_origin, "count", 5));
    config.demo.noise_scale =
        number_at(node, demo_origin, "noise_scale", 0.04);
    if (node.contains("keys")) {
      if (!node["keys"].is_array() || node["keys"].empty()) {
        fail(demo_origin, "'keys' must be a non-empty array of quaternions");
      }
      config.demo.keys.clear();
      for (std::size_t i = 0; i < node["keys"].size(); ++i) {
        json wrap;
        wrap["k"] = node["keys"][i];
        config.demo.keys.push_back(
            quat_at(wrap, demo_origin + ".keys[" + std::to_string(i) + "]", "k"));
      }
    }
    if (config.demo.samples < 2 || config.demo.count < 1 ||
        !(config.demo.duration > 0.0)) {
      fail(demo_origin, "need samples >= 2, count >= 1, duration > 0");
    }
  }

  if (root.contains("highdim_demo")) {
    const auto& node = root["highdim_demo"];
    const std::string hd_origin = origin + ".highdim_demo";
    config.highdim_demo.samples =
        static_cast<int>(number_at(node, hd_origin, "samples", 400));
    config.highdim_demo.count =
        static_cast<int>(number_at(node, hd_origin, "count", 5));
    config.highdim_demo.noise_scale =
        number_at(node, hd_origin, "noise_scale", 0.02);
  }

  config.rollout.stop = config.demo.duration;
  config.rollout.samples = config.demo.samples;
  if (root.contains("rollout")) {
    const auto& node = root["rollout"];
    const std::string ro_origin = origin + ".rollout";
    config.rollout.start = number_at(node, ro_origin, "start", 0.0);
    config.rollout.stop =
        number_at(node, ro_origin, "stop", config.rollout.stop);
    config.rollout.samples = static_cast<int>(
        number_at(node, ro_origin, "samples", config.rollout.samples));
    if (config.rollout.samples < 1) fail(ro_origin, "'samples' must be >= 1");
  }

  if (root.contains("theorem")) {
    const auto& node = root["theorem"];
    const std::string th_origin = origin + ".theorem";
    if (node.contains("delta")) {
      config.theorem.step = vector_at(node, th_origin, "delta", 3);
    }
    config.theorem.steps =
        static_cast<int>(number_at(node, th_origin, "steps", 50));
    config.theorem.dt = number_at(node, th_origin, "dt", 0.01);
  }

  if (root.contains("desired_points")) {
    const auto& arr = root["desired_points"];
    if (!arr.is_array()) fail(origin, "'desired_points' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string point_origin =
          origin + ".desired_points[" + std::to_string(i) + "]";
      const auto& node = arr[i];
      orient::DesiredState state;
      state.time = number_at(node, point_origin, "t", 0.0, /*required=*/true);
      state.orientation = quat_at(node, point_origin, "q");
      if (node.contains("omega")) {
        state.angular_velocity = vector_at(node, point_origin, "omega", 3);
      }
      state.cov = covariance_at(node, point_origin);
      config.desired_points.push_back(state);
    }
  }

  if (root.contains("desired_poses")) {
    const auto& arr = root["desired_poses"];
    if (!arr.is_array()) fail(origin, "'desired_poses' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pose_origin =
          origin + ".desired_poses[" + std::to_string(i) + "]";
      const auto& node = arr[i];
      highdim::DesiredPose pose;
      pose.input = vector_at(node, pose_origin, "s", -1);
      pose.position = vector_at(node, pose_origin, "p", 3);
      pose.orientation = quat_at(node, pose_origin, "q");
      pose.cov = covariance_at(node, pose_origin);
      config.desired_poses.push_back(pose);
    }
  }

  if (root.contains("sweep_lambda_a")) {
    const Eigen::VectorXd values =
        vector_at(root, origin, "sweep_lambda_a", -1);
    config.sweep_lambda_accel.assign(values.data(),
                                     values.data() + values.size());
    for (double v : config.sweep_lambda_accel) {
      if (!(v > 0.0)) fail(origin, "'sweep_lambda_a' entries must be positive");
    }
  }

  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open config file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace quatkmp::cli
