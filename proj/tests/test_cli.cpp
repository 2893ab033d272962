#include <fstream>
#include <sstream>

#include "doctest.h"
#include "quatkmp/commands.hpp"
#include "quatkmp/config.hpp"
#include "quatkmp/io.hpp"
#include "quatkmp/quatkmp.hpp"

using namespace quatkmp;
using cli::Mode;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/quatkmp_cli_test_") + name;
}

}  // namespace

TEST_CASE("config: defaults for an empty document") {
  const cli::RunConfig config = cli::parse_config("{}", "test");
  CHECK(config.mode == Mode::time);
  CHECK(config.kernel.kind == kmp::KernelSpec::Kind::gaussian);
  CHECK(config.kernel.ell == 0.01);
  CHECK(config.lambda == 1.0);
  CHECK(config.components == 5);
  CHECK(config.demo.count == 5);
  CHECK(config.demo.samples == 1000);
  CHECK(config.demo.duration == 10.0);
  CHECK(config.desired_points.empty());
}

TEST_CASE("config: mode-specific kernel defaults") {
  const cli::RunConfig rhythmic =
      cli::parse_config(R"({"mode":"rhythmic"})", "test");
  CHECK(rhythmic.kernel.kind == kmp::KernelSpec::Kind::periodic);
  CHECK(rhythmic.kernel.ell == 0.4);
  CHECK(rhythmic.kernel.period == 10.0);
  CHECK(rhythmic.lambda == 10.0);

  const cli::RunConfig hd = cli::parse_config(R"({"mode":"highdim"})", "test");
  CHECK(hd.kernel.kind == kmp::KernelSpec::Kind::gaussian);
  CHECK(hd.kernel.ell == 1.0);
  CHECK(hd.lambda == 2.0);
}

TEST_CASE("config: incompatible mode/kernel combinations are rejected") {
  CHECK_THROWS_AS(cli::parse_config(
                      R"({"mode":"rhythmic","kernel":{"type":"gaussian"}})",
                      "test"),
                  cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(
                      R"({"mode":"highdim","kernel":{"type":"periodic"}})",
                      "test"),
                  cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"mode":"nope"})", "test"),
                  cli::ConfigError);
}

TEST_CASE("config: malformed JSON carries a diagnostic") {
  try {
    cli::parse_config("{\"lambda\": }", "broken.json");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& err) {
    const std::string what = err.what();
    CHECK(what.find("broken.json") != std::string::npos);
  }
}

TEST_CASE("config: desired points with sigma and full covariance") {
  const cli::RunConfig config = cli::parse_config(R"({
    "desired_points": [
      {"t": 10.0, "q": [1, 0, 0, 0], "omega": [0.1, 0, 0], "sigma": 1e-6},
      {"t": 3.0, "q": [0.7071, 0.7071, 0, 0]}
    ]
  })",
                                                  "test");
  REQUIRE(config.desired_points.size() == 2);
  CHECK(config.desired_points[0].time == 10.0);
  CHECK(config.desired_points[0].angular_velocity.x() == 0.1);
  CHECK(config.desired_points[0].cov(0, 0) == 1e-6);
  CHECK(config.desired_points[1].cov(0, 0) == 1e-8);  // sigma default
  CHECK(config.desired_points[1].angular_velocity.norm() == 0.0);

  CHECK_THROWS_AS(
      cli::parse_config(R"({"desired_points":[{"q":[1,0,0,0]}]})", "test"),
      cli::ConfigError);
}

TEST_CASE("config: validation of numeric fields") {
  CHECK_THROWS_AS(cli::parse_config(R"({"lambda": -1})", "test"),
                  cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"mode":"time_accel","lambda_a":0})",
                                    "test"),
                  cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"penalty":"cubic"})", "test"),
                  cli::ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config(R"({"demo":{"samples":1}})", "test"),
      cli::ConfigError);
}

TEST_CASE("demo CSV round trip is byte identical") {
  const auto demos = quat::generate_min_jerk_demos(
      {quat::identity_quat(), quat::exp_map(quat::Tangent3(0.4, -0.2, 0.3))},
      10.0, 50, 2, 0.03, 5);
  const std::string path_a = temp_path("demos_a.csv");
  const std::string path_b = temp_path("demos_b.csv");
  cli::write_time_demos(path_a, demos);
  cli::write_time_demos(path_b, cli::read_time_demos(path_a));
  CHECK(slurp(path_a) == slurp(path_b));
}

TEST_CASE("pose demo CSV round trip is byte identical") {
  const auto demos = highdim::generate_handover_demos(2, 40, 0.02, 9);
  const std::string path_a = temp_path("pose_demos_a.csv");
  const std::string path_b = temp_path("pose_demos_b.csv");
  cli::write_pose_demos(path_a, demos);
  cli::write_pose_demos(path_b, cli::read_pose_demos(path_a));
  CHECK(slurp(path_a) == slurp(path_b));
}

TEST_CASE("trajectory CSV round trip is byte identical") {
  cli::TimeTrajectoryFile traj;
  Rng rng(3);
  for (int n = 0; n < 20; ++n) {
    traj.times.push_back(0.05 * n);
    traj.quats.push_back(quat::exp_map(
        quat::Tangent3(0.1 * rng.normal(), 0.1 * rng.normal(),
                       0.1 * rng.normal())));
    traj.omegas.push_back(
        quat::AngularVelocity(rng.normal(), rng.normal(), rng.normal()));
    traj.zetas.push_back(
        quat::Tangent3(rng.normal(), rng.normal(), rng.normal()));
  }
  const std::string path_a = temp_path("traj_a.csv");
  const std::string path_b = temp_path("traj_b.csv");
  cli::write_time_trajectory(path_a, traj, /*as_json=*/false);
  cli::write_time_trajectory(path_b, cli::read_time_trajectory(path_a), false);
  CHECK(slurp(path_a) == slurp(path_b));
}

TEST_CASE("readers reject rows with non-unit quaternions") {
  const std::string path = temp_path("bad_traj.csv");
  std::ofstream out(path);
  out << "t,qw,qx,qy,qz,wx,wy,wz,zx,zy,zz\n";
  out << "0,0.9,0.2,0,0,0,0,0,0,0,0\n";
  out.close();
  CHECK_THROWS_AS(cli::read_time_trajectory(path), cli::IoError);
}

TEST_CASE("model files reload to a bitwise-equivalent model") {
  const auto demos = quat::generate_min_jerk_demos(
      {quat::identity_quat(), quat::exp_map(quat::Tangent3(0.4, -0.2, 0.3))},
      10.0, 80, 3, 0.03, 11);
  orient::LearnOptions opts;
  opts.components = 3;
  opts.grid_size = 20;
  opts.seed = 4;
  const auto learned = orient::learn(
      demos, demos[0].quats[0], kmp::KernelSpec::gaussian_kernel(0.01), opts);

  cli::StoredModel stored;
  stored.mode = Mode::time;
  stored.time_model = learned.model;
  stored.reference = learned.reference;

  const std::string path_a = temp_path("model_a.json");
  const std::string path_b = temp_path("model_b.json");
  cli::save_model(path_a, stored);
  const cli::StoredModel reloaded = cli::load_model(path_a);
  cli::save_model(path_b, reloaded);
  CHECK(slurp(path_a) == slurp(path_b));

  CHECK((reloaded.time_model.machine.dual_coeffs -
         stored.time_model.machine.dual_coeffs)
            .norm() == 0.0);
  CHECK(reloaded.reference.size() == stored.reference.size());
  CHECK((reloaded.time_model.base.coeffs() - stored.time_model.base.coeffs())
            .norm() == 0.0);

  // Predictions from the reloaded model are identical.
  for (double t : {0.3, 4.4, 9.7}) {
    const Eigen::VectorXd a = kmp::predict(stored.time_model.machine,
                                           Eigen::VectorXd::Constant(1, t));
    const Eigen::VectorXd b = kmp::predict(reloaded.time_model.machine,
                                           Eigen::VectorXd::Constant(1, t));
    CHECK((a - b).norm() == 0.0);
  }
}
