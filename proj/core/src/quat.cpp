#include "quatkmp/quat.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "quatkmp/rng.hpp"

namespace quatkmp::quat {

namespace {

constexpr double kAntipodeTol = 1e-9;
constexpr double kZeroVecTol = 1e-12;

Eigen::Vector3d normalized_or_throw(double w, const Eigen::Vector3d& v,
                                    double* w_out) {
  const double norm = std::sqrt(w * w + v.squaredNorm());
  if (!(norm > kZeroVecTol)) {
    throw DomainError("quaternion has (near-)zero norm");
  }
  *w_out = w / norm;
  return v / norm;
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  v_ = normalized_or_throw(w, Eigen::Vector3d(x, y, z), &w_);
}

UnitQuaternion::UnitQuaternion(double w, const Eigen::Vector3d& v) {
  v_ = normalized_or_throw(w, v, &w_);
}

bool is_near_antipode(const UnitQuaternion& q) {
  return q.w() < -1.0 + kAntipodeTol && q.vec().norm() < kAntipodeTol;
}

UnitQuaternion product(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double w = a.w() * b.w() - a.vec().dot(b.vec());
  const Eigen::Vector3d v =
      a.w() * b.vec() + b.w() * a.vec() + a.vec().cross(b.vec());
  return UnitQuaternion(w, v);
}

UnitQuaternion conjugate(const UnitQuaternion& q) {
  return UnitQuaternion(q.w(), -q.vec());
}

Tangent3 log_map(const UnitQuaternion& q) {
  if (is_near_antipode(q)) {
    throw DomainError("log map undefined at [-1, 0, 0, 0]");
  }
  const double u_norm = q.vec().norm();
  if (u_norm < kZeroVecTol) {
    return Tangent3::Zero();
  }
  const double w = std::clamp(q.w(), -1.0, 1.0);
  return std::acos(w) * (q.vec() / u_norm);
}

UnitQuaternion exp_map(const Tangent3& z) {
  const double norm = z.norm();
  if (norm >= std::numbers::pi) {
    throw DomainError("exp map requires |z| < pi, got " + std::to_string(norm));
  }
  if (norm < kZeroVecTol) {
    return UnitQuaternion();
  }
  return UnitQuaternion(std::cos(norm), (std::sin(norm) / norm) * z);
}

double distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const UnitQuaternion rel = product(a, conjugate(b));
  if (is_near_antipode(rel)) {
    return 2.0 * std::numbers::pi;
  }
  return 2.0 * log_map(rel).norm();
}

UnitQuaternion integrate(const UnitQuaternion& q, const AngularVelocity& omega,
                         double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("integration step must be positive");
  }
  return product(exp_map(0.5 * dt * omega), q);
}

AngularVelocity angular_velocity(const UnitQuaternion& q_from,
                                 const UnitQuaternion& q_to, double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("time step must be positive");
  }
  return (2.0 / dt) * log_map(product(q_to, conjugate(q_from)));
}

std::vector<QuatDemo> align_hemispheres(std::vector<QuatDemo> demos) {
  if (demos.empty()) return demos;
  const std::size_t length = demos.front().size();
  for (const QuatDemo& demo : demos) {
    if (demo.size() != length || demo.quats.size() != demo.times.size()) {
      throw DimError("demos must share a common length");
    }
  }
  // Within each demo, chain the sign from the first sample.
  for (QuatDemo& demo : demos) {
    for (std::size_t n = 1; n < demo.size(); ++n) {
      if (demo.quats[n - 1].dot(demo.quats[n]) < 0.0) {
        demo.quats[n] = demo.quats[n].negated();
      }
    }
  }
  // The overall sign of each demo is still free; pin it to the first demo.
  for (std::size_t m = 1; m < demos.size(); ++m) {
    if (length > 0 && demos[0].quats[0].dot(demos[m].quats[0]) < 0.0) {
      for (UnitQuaternion& q : demos[m].quats) q = q.negated();
    }
  }
  for (std::size_t n = 0; n < length; ++n) {
    for (std::size_t i = 0; i < demos.size(); ++i) {
      for (std::size_t j = i + 1; j < demos.size(); ++j) {
        if (demos[i].quats[n].dot(demos[j].quats[n]) <= 0.0) {
          throw AlignmentError("demos " + std::to_string(i) + " and " +
                               std::to_string(j) + " leave a common hemisphere at step " +
                               std::to_string(n));
        }
      }
    }
  }
  return demos;
}

namespace {

// Rest-to-rest quintic: h(0)=0, h(1)=1, zero first and second derivatives
// at both ends.
double quintic_blend(double tau) {
  return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

}  // namespace

std::vector<QuatDemo> generate_min_jerk_demos(
    const std::vector<UnitQuaternion>& keys, double duration, int samples,
    int count, double noise_scale, std::uint64_t seed) {
  if (keys.empty()) throw DimError("need at least one key orientation");
  if (samples < 2 || count < 1 || !(duration > 0.0)) {
    throw DimError("need samples >= 2, count >= 1, duration > 0");
  }

  const UnitQuaternion base = keys.front();
  std::vector<Tangent3> knots;
  knots.reserve(keys.size());
  for (const UnitQuaternion& key : keys) {
    knots.push_back(log_map(product(key, conjugate(base))));
  }

  const int segments = static_cast<int>(knots.size()) - 1;
  const auto tangent_at = [&](double t) -> Tangent3 {
    if (segments == 0) return knots.front();
    const double span = duration / segments;
    int seg = static_cast<int>(t / span);
    seg = std::clamp(seg, 0, segments - 1);
    const double tau = std::clamp((t - seg * span) / span, 0.0, 1.0);
    return knots[seg] + quintic_blend(tau) * (knots[seg + 1] - knots[seg]);
  };

  constexpr int kHarmonics = 3;
  Rng rng(seed);
  std::vector<QuatDemo> demos(count);
  for (int m = 0; m < count; ++m) {
    // Per-demo smooth perturbation: endpoint offsets blended across the
    // demo plus low-frequency interior wiggle, all scaled by noise_scale.
    Eigen::Vector3d start_offset, end_offset;
    Eigen::Matrix<double, 3, kHarmonics> amplitude;
    for (int axis = 0; axis < 3; ++axis) {
      start_offset[axis] = noise_scale * rng.normal();
      end_offset[axis] = noise_scale * rng.normal();
      for (int k = 0; k < kHarmonics; ++k) {
        amplitude(axis, k) = noise_scale * rng.normal() / ((k + 1) * (k + 1));
      }
    }
    QuatDemo& demo = demos[m];
    demo.times.resize(samples);
    demo.quats.reserve(samples);
    for (int n = 0; n < samples; ++n) {
      const double t = duration * n / (samples - 1);
      const double tau = t / duration;
      demo.times[n] = t;
      Tangent3 z = tangent_at(t) + (1.0 - tau) * start_offset + tau * end_offset;
      for (int k = 0; k < kHarmonics; ++k) {
        z += amplitude.col(k) * std::sin((k + 1) * std::numbers::pi * tau);
      }
      demo.quats.push_back(product(exp_map(z), base));
    }
  }
  return align_hemispheres(std::move(demos));
}

}  // namespace quatkmp::quat
