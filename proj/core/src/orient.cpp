#include "quatkmp/orient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace quatkmp::orient {

namespace {

void check_alignment(const std::vector<quat::QuatDemo>& demos) {
  for (std::size_t m = 0; m < demos.size(); ++m) {
    const quat::QuatDemo& demo = demos[m];
    if (demo.quats.size() != demo.times.size()) {
      throw DimError("demo " + std::to_string(m) + " has mismatched lengths");
    }
    for (std::size_t n = 1; n < demo.size(); ++n) {
      if (demo.quats[n - 1].dot(demo.quats[n]) <= 0.0) {
        throw AlignmentError("demo " + std::to_string(m) +
                             " crosses hemispheres at step " + std::to_string(n));
      }
    }
  }
  // Cross-demo consistency is only defined for co-timed samples.
  const bool common_length =
      std::all_of(demos.begin(), demos.end(), [&](const quat::QuatDemo& d) {
        return d.size() == demos.front().size();
      });
  if (!common_length) return;
  for (std::size_t n = 0; n < demos.front().size(); ++n) {
    for (std::size_t i = 0; i < demos.size(); ++i) {
      for (std::size_t j = i + 1; j < demos.size(); ++j) {
        if (demos[i].quats[n].dot(demos[j].quats[n]) <= 0.0) {
          throw AlignmentError("demos " + std::to_string(i) + " and " +
                               std::to_string(j) +
                               " disagree on hemisphere at step " +
                               std::to_string(n));
        }
      }
    }
  }
}

}  // namespace

std::vector<TimeSample> transform_demos(const std::vector<quat::QuatDemo>& demos,
                                        const quat::UnitQuaternion& base) {
  check_alignment(demos);
  std::vector<TimeSample> samples;
  for (const quat::QuatDemo& demo : demos) {
    const std::size_t n = demo.size();
    std::vector<quat::Tangent3> zeta(n);
    for (std::size_t k = 0; k < n; ++k) {
      zeta[k] = quat::log_map(quat::product(demo.quats[k], quat::conjugate(base)));
    }
    std::vector<quat::Tangent3> zeta_dot(n, quat::Tangent3::Zero());
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double dt = demo.times[k + 1] - demo.times[k];
      if (!(dt > 0.0)) {
        throw DimError("demo times must be strictly increasing");
      }
      zeta_dot[k] = (zeta[k + 1] - zeta[k]) / dt;
    }
    if (n >= 2) zeta_dot[n - 1] = zeta_dot[n - 2];
    for (std::size_t k = 0; k < n; ++k) {
      TimeSample sample;
      sample.time = demo.times[k];
      sample.eta.head<3>() = zeta[k];
      sample.eta.tail<3>() = zeta_dot[k];
      samples.push_back(sample);
    }
  }
  return samples;
}

LearnResult learn(const std::vector<quat::QuatDemo>& demos,
                  const quat::UnitQuaternion& base,
                  const kmp::KernelSpec& kernel, const LearnOptions& opts) {
  if (demos.empty()) throw DimError("need at least one demonstration");
  const std::vector<TimeSample> samples = transform_demos(demos, base);

  Eigen::MatrixXd data(samples.size(), 7);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    data(i, 0) = samples[i].time;
    data.row(i).tail<6>() = samples[i].eta.transpose();
  }

  LearnResult result;
  result.model.base = base;
  result.model.delta_t = opts.delta_t;
  result.model.penalty = opts.penalty;
  result.model.mixture =
      gmm::fit_em(data, /*input_dim=*/1, opts.components, opts.seed, opts.em);

  double t_first = std::numeric_limits<double>::infinity();
  double t_last = -std::numeric_limits<double>::infinity();
  for (const quat::QuatDemo& demo : demos) {
    t_first = std::min(t_first, demo.times.front());
    t_last = std::max(t_last, demo.times.back());
  }
  const int grid =
      opts.grid_size > 0 ? opts.grid_size : static_cast<int>(demos.front().size());
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(grid);
  for (int k = 0; k < grid; ++k) {
    Eigen::VectorXd t(1);
    t[0] = grid == 1 ? t_first
                     : t_first + (t_last - t_first) * k / (grid - 1);
    inputs.push_back(t);
  }
  result.reference = gmm::build_reference(result.model.mixture, inputs);

  result.model.machine =
      opts.lambda_accel > 0.0
          ? kmp::fit_constrained(result.reference, kernel, opts.lambda,
                                 opts.lambda_accel, opts.penalty)
          : kmp::fit(result.reference, kernel, kmp::BlockLayout::time_deriv(),
                     opts.lambda);
  return result;
}

std::vector<kmp::DesiredPoint> transform_desired(
    const std::vector<DesiredState>& desired, const quat::UnitQuaternion& base,
    double delta_t) {
  if (!(delta_t > 0.0)) throw DimError("delta_t must be positive");
  std::vector<kmp::DesiredPoint> points;
  points.reserve(desired.size());
  for (const DesiredState& state : desired) {
    const quat::Tangent3 zeta =
        quat::log_map(quat::product(state.orientation, quat::conjugate(base)));
    quat::Tangent3 zeta_dot = quat::Tangent3::Zero();
    if (!state.angular_velocity.isZero(0.0)) {
      const quat::UnitQuaternion ahead =
          quat::integrate(state.orientation, state.angular_velocity, delta_t);
      const quat::Tangent3 zeta_ahead =
          quat::log_map(quat::product(ahead, quat::conjugate(base)));
      zeta_dot = (zeta_ahead - zeta) / delta_t;
    }
    kmp::DesiredPoint point;
    point.input = Eigen::VectorXd::Constant(1, state.time);
    point.mean = Eigen::VectorXd(6);
    point.mean.head<3>() = zeta;
    point.mean.tail<3>() = zeta_dot;
    point.cov = state.cov;
    points.push_back(std::move(point));
  }
  return points;
}

LearnResult adapt(const Model& model, const std::vector<DesiredState>& desired,
                  const std::vector<gmm::RefPoint>& reference) {
  LearnResult result;
  result.reference = kmp::extend_reference(
      reference, transform_desired(desired, model.base, model.delta_t));
  result.model = model;
  result.model.machine =
      model.machine.lambda_accel > 0.0
          ? kmp::fit_constrained(result.reference, model.machine.kernel,
                                 model.machine.lambda,
                                 model.machine.lambda_accel, model.penalty)
          : kmp::fit(result.reference, model.machine.kernel,
                     kmp::BlockLayout::time_deriv(), model.machine.lambda);
  return result;
}

Trajectory rollout(const Model& model, const std::vector<double>& times) {
  Trajectory traj;
  traj.times = times;
  traj.quats.reserve(times.size());
  for (double t : times) {
    const Eigen::VectorXd eta =
        kmp::predict(model.machine, Eigen::VectorXd::Constant(1, t));
    const quat::Tangent3 zeta = eta.head<3>();
    if (zeta.norm() >= std::numbers::pi) {
      throw DomainError("predicted |zeta| = " + std::to_string(zeta.norm()) +
                        " >= pi at t = " + std::to_string(t));
    }
    traj.quats.push_back(quat::product(quat::exp_map(zeta), model.base));
  }
  traj.omegas.assign(times.size(), quat::AngularVelocity::Zero());
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    traj.omegas[n] = quat::angular_velocity(traj.quats[n], traj.quats[n + 1],
                                            times[n + 1] - times[n]);
  }
  if (times.size() >= 2) {
    traj.omegas.back() = traj.omegas[times.size() - 2];
  }
  return traj;
}

Metrics metrics(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 3) throw LengthError("metrics need at least 3 samples");
  Metrics m;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m.quat_cost +=
        (traj.quats[k + 1].coeffs() - traj.quats[k].coeffs()).norm();
    m.omega_cost += (traj.omegas[k + 1] - traj.omegas[k]).norm();
    const double dt = traj.times[k + 1] - traj.times[k];
    m.accel_cost += ((traj.omegas[k + 1] - traj.omegas[k]) / dt).squaredNorm();
  }
  m.quat_cost /= n;
  m.omega_cost /= n;
  m.accel_cost /= n;
  return m;
}

TheoremReport verify_theorems(const quat::Tangent3& step,
                              const quat::UnitQuaternion& base, int n_steps,
                              double dt) {
  if (n_steps < 2 || !(dt > 0.0)) {
    throw DimError("need n_steps >= 2 and dt > 0");
  }
  const double linear_extent = ((n_steps + 1) * step).norm();
  const double quadratic_extent =
      (0.5 * (n_steps + 2) * (n_steps + 1) * dt * step).norm();
  if (linear_extent >= std::numbers::pi || quadratic_extent >= std::numbers::pi) {
    throw DomainError("theorem construction leaves the exp-map domain");
  }

  TheoremReport report;

  // Constant-velocity construction: zeta_k = k * step.
  {
    std::vector<quat::UnitQuaternion> quats;
    for (int k = 0; k <= n_steps + 1; ++k) {
      quats.push_back(quat::product(quat::exp_map(k * step), base));
    }
    std::vector<quat::AngularVelocity> omegas;
    for (std::size_t k = 0; k + 1 < quats.size(); ++k) {
      omegas.push_back(quat::angular_velocity(quats[k], quats[k + 1], dt));
    }
    const quat::AngularVelocity expected = 2.0 * step / dt;
    for (const auto& omega : omegas) {
      report.omega_const_error =
          std::max(report.omega_const_error, (omega - expected).norm());
    }
    for (std::size_t k = 0; k + 1 < omegas.size(); ++k) {
      report.max_omega_dot = std::max(
          report.max_omega_dot, ((omegas[k + 1] - omegas[k]) / dt).norm());
    }
  }

  // Constant-acceleration construction: zeta_k = k (k - 1) dt step / 2.
  {
    std::vector<quat::UnitQuaternion> quats;
    for (int k = 0; k <= n_steps + 2; ++k) {
      quats.push_back(quat::product(
          quat::exp_map(0.5 * k * (k - 1) * dt * step), base));
    }
    std::vector<quat::AngularVelocity> omegas;
    for (std::size_t k = 0; k + 1 < quats.size(); ++k) {
      omegas.push_back(quat::angular_velocity(quats[k], quats[k + 1], dt));
    }
    for (std::size_t k = 0; k + 1 < omegas.size(); ++k) {
      report.omega_step_error =
          std::max(report.omega_step_error,
                   (omegas[k + 1] - omegas[k] - 2.0 * step).norm());
    }
    std::vector<quat::AngularVelocity> omega_dots;
    for (std::size_t k = 0; k + 1 < omegas.size(); ++k) {
      omega_dots.push_back((omegas[k + 1] - omegas[k]) / dt);
    }
    for (std::size_t k = 0; k + 1 < omega_dots.size(); ++k) {
      report.max_omega_ddot =
          std::max(report.max_omega_ddot,
                   ((omega_dots[k + 1] - omega_dots[k]) / dt).norm());
    }
  }
  return report;
}

}  // namespace quatkmp::orient
