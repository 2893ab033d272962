#pragma once

#include <functional>
#include <optional>
#include <string>

#include "quatkmp/config.hpp"

namespace quatkmp::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string format = "csv";
};

struct RolloutArgs {
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<int> samples;
  std::string inputs_path;  // highdim models: query inputs CSV
};

int cmd_gen_demos(const CommonArgs& args);
int cmd_train(const CommonArgs& args, const std::string& demos_path);
int cmd_adapt(const CommonArgs& args, const std::string& model_path);
int cmd_rollout(const CommonArgs& args, const std::string& model_path,
                const RolloutArgs& rollout);
int cmd_eval(const CommonArgs& args, const std::string& trajectory_path);
int cmd_verify_theorems(const CommonArgs& args);
int cmd_sweep_lambda(const CommonArgs& args, const std::string& demos_path);

/// Runs `body`, mapping exceptions to the documented exit codes:
/// 0 success, 2 configuration/input error, 3 numerical failure,
/// 4 manifold assumption violation.
int run_guarded(const std::function<void()>& body);

}  // namespace quatkmp::cli
