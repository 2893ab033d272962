#include <benchmark/benchmark.h>

#include "quatkmp/quatkmp.hpp"

using namespace quatkmp;

namespace {

std::vector<gmm::RefPoint> reference_points(int n) {
  std::vector<gmm::RefPoint> reference;
  reference.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = 10.0 * i / (n - 1);
    gmm::RefPoint point;
    point.input = Eigen::VectorXd::Constant(1, t);
    Eigen::VectorXd eta(6);
    eta << 0.4 * std::sin(0.5 * t), 0.3 * std::cos(0.4 * t),
        -0.2 * std::sin(0.7 * t), 0.2 * std::cos(0.5 * t),
        -0.12 * std::sin(0.4 * t), -0.14 * std::cos(0.7 * t);
    point.mean = eta;
    point.cov = 1e-3 * Eigen::MatrixXd::Identity(6, 6);
    reference.push_back(point);
  }
  return reference;
}

void BM_LogExpRoundTrip(benchmark::State& state) {
  Rng rng(1);
  std::vector<quat::Tangent3> tangents;
  for (int i = 0; i < 1024; ++i) {
    tangents.push_back(quat::Tangent3(rng.normal(), rng.normal(), rng.normal())
                           .normalized() *
                       2.5 * rng.uniform());
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        quat::log_map(quat::exp_map(tangents[i++ & 1023])));
  }
}
BENCHMARK(BM_LogExpRoundTrip);

void BM_KernelBlock(benchmark::State& state) {
  const auto layout =
      state.range(0) == 0 ? kmp::BlockLayout::time_deriv()
                          : kmp::BlockLayout::time_accel();
  const auto spec = kmp::KernelSpec::gaussian_kernel(0.01, 1e-4);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 1.7);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 6.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmp::kernel_block(spec, layout, a, b));
  }
}
BENCHMARK(BM_KernelBlock)->Arg(0)->Arg(1);

void BM_Fit(benchmark::State& state) {
  const auto reference = reference_points(static_cast<int>(state.range(0)));
  const auto spec = kmp::KernelSpec::gaussian_kernel(0.01, 1e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kmp::fit(reference, spec, kmp::BlockLayout::time_deriv(), 1.0));
  }
}
BENCHMARK(BM_Fit)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto reference = reference_points(static_cast<int>(state.range(0)));
  const auto spec = kmp::KernelSpec::gaussian_kernel(0.01, 1e-4);
  const auto model =
      kmp::fit(reference, spec, kmp::BlockLayout::time_deriv(), 1.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.01;
    if (t > 10.0) t = 0.0;
    benchmark::DoNotOptimize(
        kmp::predict(model, Eigen::VectorXd::Constant(1, t)));
  }
}
BENCHMARK(BM_Predict)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_GmrCondition(benchmark::State& state) {
  Rng rng(3);
  Eigen::MatrixXd data(600, 7);
  for (int i = 0; i < data.rows(); ++i) {
    data(i, 0) = 10.0 * i / (data.rows() - 1);
    for (int d = 1; d < 7; ++d) {
      data(i, d) = std::sin(0.3 * d * data(i, 0)) + 0.05 * rng.normal();
    }
  }
  const auto mixture =
      gmm::fit_em(data, 1, static_cast<int>(state.range(0)), 5);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.013;
    if (t > 10.0) t = 0.0;
    benchmark::DoNotOptimize(
        gmm::condition(mixture, Eigen::VectorXd::Constant(1, t)));
  }
}
BENCHMARK(BM_GmrCondition)->Arg(3)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
