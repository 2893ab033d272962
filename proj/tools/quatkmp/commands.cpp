#include "quatkmp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "quatkmp/io.hpp"
#include "quatkmp/log.hpp"

namespace quatkmp::cli {

namespace {

using nlohmann::json;

RunConfig config_for(const CommonArgs& args) {
  if (args.config_path.empty()) {
    throw ConfigError("--config is required for this command");
  }
  RunConfig config = load_config(args.config_path);
  if (args.seed) config.seed = *args.seed;
  return config;
}

bool json_format(const CommonArgs& args) {
  if (args.format == "json") return true;
  if (args.format == "csv") return false;
  throw ConfigError("--format must be 'csv' or 'json'");
}

std::vector<double> rollout_grid(const RunConfig& config,
                                 const RolloutArgs& args) {
  const double start = args.start.value_or(config.rollout.start);
  const double stop = args.stop.value_or(config.rollout.stop);
  const int samples = args.samples.value_or(config.rollout.samples);
  if (samples < 1 || !(stop >= start)) {
    throw ConfigError("rollout needs samples >= 1 and stop >= start");
  }
  std::vector<double> times;
  times.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    times.push_back(samples == 1
                        ? start
                        : start + (stop - start) * i / (samples - 1));
  }
  return times;
}

quat::UnitQuaternion time_base(const RunConfig& config,
                               const std::vector<quat::QuatDemo>& demos) {
  if (config.base_quat) return *config.base_quat;
  return demos.front().quats.front();
}

StoredModel train_time_model(const RunConfig& config,
                             const std::vector<quat::QuatDemo>& demos) {
  orient::LearnOptions opts;
  opts.components = config.components;
  opts.lambda = config.lambda;
  opts.lambda_accel =
      config.mode == Mode::time_accel ? config.lambda_accel : 0.0;
  opts.penalty = config.penalty;
  opts.grid_size = config.grid_n;
  opts.seed = config.seed;
  opts.delta_t = config.delta_t;
  const auto result =
      orient::learn(demos, time_base(config, demos), config.kernel, opts);
  StoredModel stored;
  stored.mode = config.mode;
  stored.time_model = result.model;
  stored.reference = result.reference;
  return stored;
}

StoredModel train_pose_model(const RunConfig& config,
                             const std::vector<highdim::PoseDemo>& demos) {
  highdim::LearnOptions opts;
  opts.components = config.components;
  opts.lambda = config.lambda;
  opts.sample_count = config.sample_n;
  opts.seed = config.seed;
  const quat::UnitQuaternion base =
      config.base_quat ? *config.base_quat : quat::identity_quat();
  const auto result = highdim::learn(demos, base, config.kernel, opts);
  StoredModel stored;
  stored.mode = Mode::highdim;
  stored.pose_model = result.model;
  stored.reference = result.reference;
  return stored;
}

TimeTrajectoryFile to_file(const orient::Trajectory& traj,
                           const quat::UnitQuaternion& base) {
  TimeTrajectoryFile file;
  file.times = traj.times;
  file.quats = traj.quats;
  file.omegas = traj.omegas;
  file.zetas.reserve(traj.size());
  for (const auto& q : traj.quats) {
    file.zetas.push_back(quat::log_map(quat::product(q, quat::conjugate(base))));
  }
  return file;
}

orient::Metrics metrics_of_file(const TimeTrajectoryFile& traj) {
  orient::Trajectory t;
  t.times = traj.times;
  t.quats = traj.quats;
  t.omegas = traj.omegas;
  return orient::metrics(t);
}

std::size_t nearest_time_row(const TimeTrajectoryFile& traj, double t) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double d = std::abs(traj.times[n] - t);
    if (d < best_dist) {
      best_dist = d;
      best = n;
    }
  }
  return best;
}

json desired_point_report(const TimeTrajectoryFile& traj,
                          const std::vector<orient::DesiredState>& desired) {
  json rows = json::array();
  for (const auto& want : desired) {
    const std::size_t n = nearest_time_row(traj, want.time);
    json row;
    row["t"] = want.time;
    row["quat_distance"] = quat::distance(traj.quats[n], want.orientation);
    row["omega_error"] = (traj.omegas[n] - want.angular_velocity).norm();
    rows.push_back(row);
  }
  return rows;
}

void emit_report(const CommonArgs& args, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (!args.out_path.empty()) {
    write_text_file(args.out_path, text);
  }
  std::fputs(text.c_str(), stdout);
}

}  // namespace

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& err) {
    log_error(err.what());
    return 2;
  } catch (const IoError& err) {
    log_error(err.what());
    return 2;
  } catch (const DomainError& err) {
    log_error(err.what());
    return 4;
  } catch (const AlignmentError& err) {
    log_error(err.what());
    return 4;
  } catch (const FitError& err) {
    log_error(err.what());
    return 3;
  } catch (const SolveError& err) {
    log_error(err.what());
    return 3;
  } catch (const ConditionError& err) {
    log_error(err.what());
    return 3;
  } catch (const Error& err) {
    log_error(err.what());
    return 2;
  } catch (const std::exception& err) {
    log_error(err.what());
    return 2;
  }
}

int cmd_gen_demos(const CommonArgs& args) {
  return run_guarded([&] {
    const RunConfig config = config_for(args);
    if (args.out_path.empty()) throw ConfigError("--out is required");
    if (config.mode == Mode::highdim) {
      const auto demos = highdim::generate_handover_demos(
          config.highdim_demo.count, config.highdim_demo.samples,
          config.highdim_demo.noise_scale, config.seed);
      write_pose_demos(args.out_path, demos);
      std::printf("wrote %d pose demos x %d samples to %s\n",
                  config.highdim_demo.count, config.highdim_demo.samples,
                  args.out_path.c_str());
      return;
    }
    const auto demos = quat::generate_min_jerk_demos(
        config.demo.keys, config.demo.duration, config.demo.samples,
        config.demo.count, config.demo.noise_scale, config.seed);
    write_time_demos(args.out_path, demos);
    std::printf("wrote %d demos x %d samples over %g s to %s\n",
                config.demo.count, config.demo.samples, config.demo.duration,
                args.out_path.c_str());
  });
}

int cmd_train(const CommonArgs& args, const std::string& demos_path) {
  return run_guarded([&] {
    const RunConfig config = config_for(args);
    if (args.out_path.empty()) throw ConfigError("--out is required");
    if (demos_path.empty()) throw ConfigError("--demos is required");
    StoredModel stored;
    if (config.mode == Mode::highdim) {
      stored = train_pose_model(config, read_pose_demos(demos_path));
    } else {
      stored = train_time_model(config, read_time_demos(demos_path));
    }
    save_model(args.out_path, stored);
    log_info("trained " + mode_name(config.mode) + " model with " +
             std::to_string(stored.reference.size()) + " reference points");
    std::printf("wrote model to %s\n", args.out_path.c_str());
  });
}

int cmd_adapt(const CommonArgs& args, const std::string& model_path) {
  return run_guarded([&] {
    const RunConfig config = config_for(args);
    if (args.out_path.empty()) throw ConfigError("--out is required");
    if (model_path.empty()) throw ConfigError("--model is required");
    StoredModel stored = load_model(model_path);
    if (stored.mode == Mode::highdim) {
      if (config.desired_poses.empty()) {
        throw ConfigError("config has no 'desired_poses' to adapt towards");
      }
      const auto result = highdim::adapt(stored.pose_model,
                                         config.desired_poses, stored.reference);
      stored.pose_model = result.model;
      stored.reference = result.reference;
    } else {
      if (config.desired_points.empty()) {
        throw ConfigError("config has no 'desired_points' to adapt towards");
      }
      const auto result = orient::adapt(stored.time_model,
                                        config.desired_points, stored.reference);
      stored.time_model = result.model;
      stored.reference = result.reference;
    }
    save_model(args.out_path, stored);
    std::printf("wrote adapted model to %s\n", args.out_path.c_str());
  });
}

int cmd_rollout(const CommonArgs& args, const std::string& model_path,
                const RolloutArgs& rollout) {
  return run_guarded([&] {
    if (args.out_path.empty()) throw ConfigError("--out is required");
    if (model_path.empty()) throw ConfigError("--model is required");
    const StoredModel stored = load_model(model_path);
    const bool as_json = json_format(args);
    if (stored.mode == Mode::highdim) {
      if (rollout.inputs_path.empty()) {
        throw ConfigError("--inputs is required for highdim rollouts");
      }
      const auto inputs = read_inputs_csv(rollout.inputs_path);
      PoseTrajectoryFile traj;
      for (const auto& s : inputs) {
        const highdim::Pose pose = highdim::predict(stored.pose_model, s);
        traj.inputs.push_back(s);
        traj.positions.push_back(pose.position);
        traj.quats.push_back(pose.orientation);
      }
      write_pose_trajectory(args.out_path, traj, as_json);
      std::printf("wrote %zu predicted poses to %s\n", traj.inputs.size(),
                  args.out_path.c_str());
      return;
    }
    // Time-driven rollout. The grid comes from the config when present,
    // otherwise from the flags alone.
    RunConfig config;
    if (!args.config_path.empty()) config = load_config(args.config_path);
    const auto times = rollout_grid(config, rollout);
    const auto traj = orient::rollout(stored.time_model, times);
    write_time_trajectory(args.out_path, to_file(traj, stored.time_model.base),
                          as_json);
    std::printf("wrote %zu trajectory samples to %s\n", traj.size(),
                args.out_path.c_str());
  });
}

int cmd_eval(const CommonArgs& args, const std::string& trajectory_path) {
  return run_guarded([&] {
    if (trajectory_path.empty()) throw ConfigError("--trajectory is required");
    RunConfig config;
    if (!args.config_path.empty()) config = load_config(args.config_path);

    // Pose trajectories start with an input column block.
    std::ifstream probe(trajectory_path);
    if (!probe) throw IoError(trajectory_path + ": cannot open file");
    std::string header;
    std::getline(probe, header);
    probe.close();

    json doc;
    if (header.rfind("s0,", 0) == 0) {
      const PoseTrajectoryFile traj = read_pose_trajectory(trajectory_path);
      json rows = json::array();
      for (const auto& want : config.desired_poses) {
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < traj.inputs.size(); ++n) {
          const double d = (traj.inputs[n] - want.input).norm();
          if (d < best_dist) {
            best_dist = d;
            best = n;
          }
        }
        json row;
        row["input_distance"] = best_dist;
        row["position_error"] =
            (traj.positions[best] - want.position).norm();
        row["quat_distance"] =
            quat::distance(traj.quats[best], want.orientation);
        rows.push_back(row);
      }
      doc["desired_poses"] = rows;
    } else {
      const TimeTrajectoryFile traj = read_time_trajectory(trajectory_path);
      const orient::Metrics m = metrics_of_file(traj);
      doc["c_q"] = m.quat_cost;
      doc["c_omega"] = m.omega_cost;
      doc["c_omega_dot"] = m.accel_cost;
      doc["desired_points"] = desired_point_report(traj, config.desired_points);
    }
    emit_report(args, doc);
  });
}

int cmd_verify_theorems(const CommonArgs& args) {
  return run_guarded([&] {
    RunConfig config;
    if (!args.config_path.empty()) config = load_config(args.config_path);
    const auto report = orient::verify_theorems(
        config.theorem.step, quat::identity_quat(), config.theorem.steps,
        config.theorem.dt);
    json doc;
    doc["max_omega_dot"] = report.max_omega_dot;
    doc["omega_const_error"] = report.omega_const_error;
    doc["max_omega_ddot"] = report.max_omega_ddot;
    doc["omega_step_error"] = report.omega_step_error;
    const bool ok =
        report.max_omega_dot <= 1e-8 && report.max_omega_ddot <= 1e-6;
    doc["pass"] = ok;
    emit_report(args, doc);
    if (!ok) {
      throw SolveError("theorem constructions exceeded the tolerances");
    }
  });
}

int cmd_sweep_lambda(const CommonArgs& args, const std::string& demos_path) {
  return run_guarded([&] {
    const RunConfig config = config_for(args);
    if (demos_path.empty()) throw ConfigError("--demos is required");
    if (config.mode == Mode::highdim) {
      throw ConfigError("sweep-lambda-a applies to time-driven modes");
    }
    const auto demos = read_time_demos(demos_path);

    // The reference and the transformed desired points are fixed across
    // the sweep; only the penalty weight changes.
    orient::LearnOptions opts;
    opts.components = config.components;
    opts.lambda = config.lambda;
    opts.grid_size = config.grid_n;
    opts.seed = config.seed;
    opts.delta_t = config.delta_t;
    const quat::UnitQuaternion base = time_base(config, demos);
    const auto learned = orient::learn(demos, base, config.kernel, opts);
    const auto extended = kmp::extend_reference(
        learned.reference,
        orient::transform_desired(config.desired_points, base, config.delta_t));

    const auto times = rollout_grid(config, RolloutArgs{});
    json results = json::array();
    double previous = std::numeric_limits<double>::infinity();
    bool non_increasing = true;
    for (double lambda_accel : config.sweep_lambda_accel) {
      orient::Model model = learned.model;
      model.machine = kmp::fit_constrained(extended, config.kernel,
                                           config.lambda, lambda_accel,
                                           config.penalty);
      const auto traj = orient::rollout(model, times);
      const auto m = orient::metrics(traj);
      json row;
      row["lambda_a"] = lambda_accel;
      row["c_q"] = m.quat_cost;
      row["c_omega"] = m.omega_cost;
      row["c_omega_dot"] = m.accel_cost;
      row["desired_points"] =
          desired_point_report(to_file(traj, base), config.desired_points);
      results.push_back(row);
      std::printf("lambda_a=%-10g c_omega_dot=%.6e\n", lambda_accel,
                  m.accel_cost);
      if (m.accel_cost > previous) non_increasing = false;
      previous = m.accel_cost;
    }
    json doc;
    doc["results"] = results;
    doc["non_increasing"] = non_increasing;
    if (!args.out_path.empty()) {
      write_text_file(args.out_path, doc.dump(2) + "\n");
    }
  });
}

}  // namespace quatkmp::cli
