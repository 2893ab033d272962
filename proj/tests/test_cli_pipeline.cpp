// End-to-end runs of the quatkmp binary. The binary path comes from the
// QUATKMP_BIN environment variable set by the test harness.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string binary() {
  const char* bin = std::getenv("QUATKMP_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

int run(const std::string& args) {
  const std::string command = binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() /
          ("quatkmp_pipeline_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

const char* kTimeConfig = R"({
  "mode": "time",
  "kernel": {"type": "gaussian", "ell": 0.01},
  "lambda": 1.0,
  "components": 5,
  "grid_n": 40,
  "seed": 123,
  "demo": {"samples": 300, "count": 5, "duration": 10.0, "noise_scale": 0.04},
  "rollout": {"start": 0.0, "stop": 10.0, "samples": 500},
  "desired_points": [
    {"t": 10.0, "q": [0.83599025576729778, 0.51958925575172466, -0.047235386886520437, 0.17004739279147352], "omega": [0, 0, 0], "sigma": 1e-8}
  ]
})";

const char* kHighdimConfig = R"({
  "mode": "highdim",
  "kernel": {"type": "gaussian", "ell": 1.0},
  "lambda": 2.0,
  "components": 5,
  "sample_n": 120,
  "seed": 21,
  "highdim_demo": {"samples": 200, "count": 5, "noise_scale": 0.02},
  "desired_poses": [
    {"s": [0.40, 0.31, 0.50], "p": [0.42, 0.27, 0.54],
     "q": [0.39882586490916829, 0.79015864163550181, -0.35557138873597578, 0.30026028382149067], "sigma": 1e-8}
  ]
})";

}  // namespace

TEST_CASE("pipeline: gen-demos is deterministic and seed-sensitive") {
  Workspace ws;
  write(ws.path("config.json"), kTimeConfig);
  CHECK(run("gen-demos --config " + ws.path("config.json") + " --out " +
            ws.path("a.csv")) == 0);
  CHECK(run("gen-demos --config " + ws.path("config.json") + " --out " +
            ws.path("b.csv")) == 0);
  CHECK(slurp(ws.path("a.csv")) == slurp(ws.path("b.csv")));
  CHECK(run("gen-demos --config " + ws.path("config.json") + " --seed 999 " +
            "--out " + ws.path("c.csv")) == 0);
  CHECK(slurp(ws.path("a.csv")) != slurp(ws.path("c.csv")));
}

TEST_CASE("pipeline: malformed config exits with code 2") {
  Workspace ws;
  write(ws.path("bad.json"), "{\"mode\": \"time\",}");
  CHECK(run("gen-demos --config " + ws.path("bad.json") + " --out " +
            ws.path("x.csv")) == 2);
  CHECK(run("train --config " + ws.path("bad.json") + " --demos nope.csv " +
            "--out " + ws.path("m.json")) == 2);
  CHECK(run("train --demos nope.csv --out " + ws.path("m.json")) == 2);
}

TEST_CASE("pipeline: assumption violations exit with code 4") {
  Workspace ws;
  // The second key is the antipode of the first: the log map has no value
  // there, so demo generation must fail with the assumption-violation code.
  write(ws.path("config.json"), R"({
    "mode": "time",
    "demo": {"keys": [[1,0,0,0],[-1,0,0,0]], "samples": 50, "count": 1}
  })");
  CHECK(run("gen-demos --config " + ws.path("config.json") + " --out " +
            ws.path("demos.csv")) == 4);
}

TEST_CASE("pipeline: train, adapt, rollout, eval on the time mode") {
  Workspace ws;
  write(ws.path("config.json"), kTimeConfig);
  REQUIRE(run("gen-demos --config " + ws.path("config.json") + " --out " +
              ws.path("demos.csv")) == 0);
  REQUIRE(run("train --config " + ws.path("config.json") + " --demos " +
              ws.path("demos.csv") + " --out " + ws.path("model.json")) == 0);

  // Retraining produces an identical model file.
  REQUIRE(run("train --config " + ws.path("config.json") + " --demos " +
              ws.path("demos.csv") + " --out " + ws.path("model2.json")) == 0);
  CHECK(slurp(ws.path("model.json")) == slurp(ws.path("model2.json")));

  REQUIRE(run("adapt --config " + ws.path("config.json") + " --model " +
              ws.path("model.json") + " --out " + ws.path("adapted.json")) ==
          0);
  REQUIRE(run("rollout --config " + ws.path("config.json") + " --model " +
              ws.path("adapted.json") + " --out " + ws.path("traj.csv")) == 0);
  REQUIRE(run("eval --config " + ws.path("config.json") + " --trajectory " +
              ws.path("traj.csv") + " --out " + ws.path("metrics.json")) == 0);

  const json metrics = json::parse(slurp(ws.path("metrics.json")));
  CHECK(metrics.contains("c_q"));
  CHECK(metrics.contains("c_omega"));
  CHECK(metrics.contains("c_omega_dot"));
  REQUIRE(metrics["desired_points"].size() == 1);
  CHECK(metrics["desired_points"][0]["quat_distance"].get<double>() <= 1e-3);
  CHECK(metrics["desired_points"][0]["omega_error"].get<double>() <= 5e-3);

  // Rollout is reproducible bit-for-bit.
  REQUIRE(run("rollout --config " + ws.path("config.json") + " --model " +
              ws.path("adapted.json") + " --out " + ws.path("traj2.csv")) == 0);
  CHECK(slurp(ws.path("traj.csv")) == slurp(ws.path("traj2.csv")));

  // JSON trajectory output parses.
  REQUIRE(run("rollout --config " + ws.path("config.json") + " --model " +
              ws.path("adapted.json") + " --format json --out " +
              ws.path("traj.json")) == 0);
  const json traj = json::parse(slurp(ws.path("traj.json")));
  CHECK(traj["rows"].size() == 500);
}

TEST_CASE("pipeline: verify-theorems and sweep-lambda-a") {
  Workspace ws;
  write(ws.path("config.json"), R"({
    "mode": "time",
    "kernel": {"type": "gaussian", "ell": 0.01},
    "grid_n": 30,
    "seed": 123,
    "demo": {"samples": 250, "count": 5, "noise_scale": 0.04},
    "rollout": {"samples": 250},
    "sweep_lambda_a": [10, 1000, 100000],
    "desired_points": [
      {"t": 10.0, "q": [0.83599025576729778, 0.51958925575172466, -0.047235386886520437, 0.17004739279147352], "sigma": 1e-8}
    ]
  })");
  CHECK(run("verify-theorems --out " + ws.path("theorems.json")) == 0);
  const json theorems = json::parse(slurp(ws.path("theorems.json")));
  CHECK(theorems["pass"].get<bool>());

  REQUIRE(run("gen-demos --config " + ws.path("config.json") + " --out " +
              ws.path("demos.csv")) == 0);
  REQUIRE(run("sweep-lambda-a --config " + ws.path("config.json") +
              " --demos " + ws.path("demos.csv") + " --out " +
              ws.path("sweep.json")) == 0);
  const json sweep = json::parse(slurp(ws.path("sweep.json")));
  CHECK(sweep["non_increasing"].get<bool>());
  REQUIRE(sweep["results"].size() == 3);
}

TEST_CASE("pipeline: rhythmic mode repeats over the period") {
  Workspace ws;
  // Cyclic demos: the key sequence returns to the start orientation.
  write(ws.path("config.json"), R"({
    "mode": "rhythmic",
    "kernel": {"type": "periodic", "ell": 0.4, "period": 10.0},
    "lambda": 10.0,
    "components": 5,
    "grid_n": 40,
    "seed": 3,
    "demo": {"keys": [[1,0,0,0],[0.87159608909660838,0.38272825717442103,-0.23920516073401312,0.19136412858721051],[1,0,0,0]],
             "samples": 250, "count": 5, "noise_scale": 0.02},
    "rollout": {"start": 0.0, "stop": 19.95, "samples": 400}
  })");
  REQUIRE(run("gen-demos --config " + ws.path("config.json") + " --out " +
              ws.path("demos.csv")) == 0);
  REQUIRE(run("train --config " + ws.path("config.json") + " --demos " +
              ws.path("demos.csv") + " --out " + ws.path("model.json")) == 0);
  REQUIRE(run("rollout --config " + ws.path("config.json") + " --model " +
              ws.path("model.json") + " --out " + ws.path("traj.csv")) == 0);
  // 200 grid steps of 0.05 s are exactly one period.
  std::ifstream in(ws.path("traj.csv"));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::array<double, 4>> quats;
  while (std::getline(in, line)) {
    std::array<double, 4> q{};
    std::sscanf(line.c_str(), "%*lf,%lf,%lf,%lf,%lf", &q[0], &q[1], &q[2],
                &q[3]);
    quats.push_back(q);
  }
  REQUIRE(quats.size() == 400);
  for (int i = 0; i < 200; ++i) {
    double diff = 0.0;
    for (int k = 0; k < 4; ++k) {
      diff = std::max(diff, std::abs(quats[i][k] - quats[i + 200][k]));
    }
    CHECK(diff <= 1e-6);
  }
}

TEST_CASE("pipeline: acceleration-penalized mode trains and rolls out") {
  Workspace ws;
  write(ws.path("config.json"), R"({
    "mode": "time_accel",
    "kernel": {"type": "gaussian", "ell": 0.01},
    "lambda": 1.0,
    "lambda_a": 1000.0,
    "components": 5,
    "grid_n": 30,
    "seed": 123,
    "demo": {"samples": 200, "count": 5, "noise_scale": 0.04},
    "rollout": {"samples": 200}
  })");
  REQUIRE(run("gen-demos --config " + ws.path("config.json") + " --out " +
              ws.path("demos.csv")) == 0);
  REQUIRE(run("train --config " + ws.path("config.json") + " --demos " +
              ws.path("demos.csv") + " --out " + ws.path("model.json")) == 0);
  REQUIRE(run("rollout --config " + ws.path("config.json") + " --model " +
              ws.path("model.json") + " --out " + ws.path("traj.csv")) == 0);
  REQUIRE(run("eval --config " + ws.path("config.json") + " --trajectory " +
              ws.path("traj.csv") + " --out " + ws.path("metrics.json")) == 0);
  const json metrics = json::parse(slurp(ws.path("metrics.json")));
  CHECK(metrics["c_omega_dot"].get<double>() >= 0.0);
}

TEST_CASE("pipeline: highdim train, adapt, rollout, eval") {
  Workspace ws;
  write(ws.path("config.json"), kHighdimConfig);
  REQUIRE(run("gen-demos --config " + ws.path("config.json") + " --out " +
              ws.path("demos.csv")) == 0);
  REQUIRE(run("train --config " + ws.path("config.json") + " --demos " +
              ws.path("demos.csv") + " --out " + ws.path("model.json")) == 0);
  REQUIRE(run("adapt --config " + ws.path("config.json") + " --model " +
              ws.path("model.json") + " --out " + ws.path("adapted.json")) ==
          0);

  write(ws.path("inputs.csv"), "s0,s1,s2\n0.40,0.31,0.50\n0.5,0.0,0.3\n");
  REQUIRE(run("rollout --model " + ws.path("adapted.json") + " --inputs " +
              ws.path("inputs.csv") + " --out " + ws.path("poses.csv")) == 0);
  REQUIRE(run("eval --config " + ws.path("config.json") + " --trajectory " +
              ws.path("poses.csv") + " --out " + ws.path("report.json")) == 0);
  const json report = json::parse(slurp(ws.path("report.json")));
  REQUIRE(report["desired_poses"].size() == 1);
  CHECK(report["desired_poses"][0]["position_error"].get<double>() <= 1e-3);
  CHECK(report["desired_poses"][0]["quat_distance"].get<double>() <= 1e-3);
}
