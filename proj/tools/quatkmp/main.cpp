#include <optional>
#include <string>

#include "CLI11.hpp"
#include "quatkmp/commands.hpp"

int main(int argc, char** argv) {
  using namespace quatkmp::cli;

  CLI::App app{
      "quatkmp: probabilistic learning and adaptation of unit-quaternion "
      "trajectories"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string demos_path;
  std::string model_path;
  std::string trajectory_path;
  RolloutArgs rollout;

  const auto add_common = [&](CLI::App* cmd, bool with_format = false) {
    cmd->add_option("--config", common.config_path, "JSON run configuration");
    cmd->add_option("--out", common.out_path, "output file path");
    cmd->add_option("--seed", common.seed, "seed override");
    if (with_format) {
      cmd->add_option("--format", common.format,
                      "output format: csv or json")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };

  CLI::App* gen = app.add_subcommand("gen-demos",
                                     "generate synthetic demonstrations");
  add_common(gen);

  CLI::App* train = app.add_subcommand("train", "fit a model to demonstrations");
  add_common(train);
  train->add_option("--demos", demos_path, "demonstration CSV file")
      ->required();

  CLI::App* adapt = app.add_subcommand(
      "adapt", "refit a model towards the config's desired points");
  add_common(adapt);
  adapt->add_option("--model", model_path, "trained model file")->required();

  CLI::App* roll = app.add_subcommand("rollout", "evaluate a model on a grid");
  add_common(roll, /*with_format=*/true);
  roll->add_option("--model", model_path, "trained model file")->required();
  roll->add_option("--start", rollout.start, "grid start time (s)");
  roll->add_option("--stop", rollout.stop, "grid stop time (s)");
  roll->add_option("--samples", rollout.samples, "number of grid samples");
  roll->add_option("--inputs", rollout.inputs_path,
                   "query inputs CSV (highdim models)");

  CLI::App* eval = app.add_subcommand("eval",
                                      "smoothness and desired-point report");
  add_common(eval);
  eval->add_option("--trajectory", trajectory_path, "trajectory CSV file")
      ->required();

  CLI::App* verify = app.add_subcommand("verify-theorems",
                                        "numeric smoothness-theorem check");
  add_common(verify);

  CLI::App* sweep = app.add_subcommand(
      "sweep-lambda-a", "acceleration-cost sweep over penalty weights");
  add_common(sweep);
  sweep->add_option("--demos", demos_path, "demonstration CSV file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }

  if (gen->parsed()) return cmd_gen_demos(common);
  if (train->parsed()) return cmd_train(common, demos_path);
  if (adapt->parsed()) return cmd_adapt(common, model_path);
  if (roll->parsed()) return cmd_rollout(common, model_path, rollout);
  if (eval->parsed()) return cmd_eval(common, trajectory_path);
  if (verify->parsed()) return cmd_verify_theorems(common);
  if (sweep->parsed()) return cmd_sweep_lambda(common, demos_path);
  return 2;
}
