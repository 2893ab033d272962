#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "quatkmp/errors.hpp"

namespace quatkmp::quat {

using Tangent3 = Eigen::Vector3d;         // log-map coordinates, radians
using AngularVelocity = Eigen::Vector3d;  // rad/s

/// Point on S3 with the unit-norm invariant maintained by construction:
/// every constructor and every operation returning a UnitQuaternion
/// renormalizes, so w^2 + |v|^2 = 1 always holds.
class UnitQuaternion {
public:
  UnitQuaternion() : w_(1.0), v_(Eigen::Vector3d::Zero()) {}
  UnitQuaternion(double w, double x, double y, double z);
  UnitQuaternion(double w, const Eigen::Vector3d& v);

  double w() const { return w_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Eigen::Vector3d& vec() const { return v_; }

  Eigen::Vector4d coeffs() const {
    return Eigen::Vector4d(w_, v_.x(), v_.y(), v_.z());
  }

  double dot(const UnitQuaternion& other) const {
    return w_ * other.w_ + v_.dot(other.v_);
  }

  // -q: the same orientation, opposite hemisphere of S3.
  UnitQuaternion negated() const { return UnitQuaternion(-w_, -v_); }

private:
  double w_;
  Eigen::Vector3d v_;
};

/// One demonstration: monotone time stamps paired with orientations.
struct QuatDemo {
  std::vector<double> times;
  std::vector<UnitQuaternion> quats;

  std::size_t size() const { return times.size(); }
};

inline UnitQuaternion identity_quat() { return UnitQuaternion(); }

/// True when q is within tolerance of [-1, 0, 0, 0], the excluded point of
/// the log map (w < -1 + 1e-9 and |v| < 1e-9).
bool is_near_antipode(const UnitQuaternion& q);

/// Hamilton product a * b, renormalized.
UnitQuaternion product(const UnitQuaternion& a, const UnitQuaternion& b);

UnitQuaternion conjugate(const UnitQuaternion& q);

/// Log map S3 -> R3: arccos(w) u/|u| for u != 0, zero otherwise.
/// Throws DomainError when q is within tolerance of [-1, 0, 0, 0].
Tangent3 log_map(const UnitQuaternion& q);

/// Exp map R3 -> S3: [cos|z|; sin|z| z/|z|] for z != 0, identity otherwise.
/// Throws DomainError when |z| >= pi.
UnitQuaternion exp_map(const Tangent3& z);

/// Distance in [0, 2*pi]: 2*pi when a*conj(b) is the antipode,
/// 2 |log(a * conj(b))| otherwise.
double distance(const UnitQuaternion& a, const UnitQuaternion& b);

/// One step of q(t + dt) = exp(omega dt / 2) * q(t).
UnitQuaternion integrate(const UnitQuaternion& q, const AngularVelocity& omega,
                         double dt);

/// Inverse of integrate: omega = (2 / dt) log(q_to * conj(q_from)).
AngularVelocity angular_velocity(const UnitQuaternion& q_from,
                                 const UnitQuaternion& q_to, double dt);

/// Resolves the sign ambiguity of every sample so that consecutive samples
/// within a demo and co-timed samples across demos have positive dot
/// products. Whole demos may be negated (q and -q are the same orientation).
/// Throws AlignmentError when no sign assignment achieves this, and DimError
/// when demo lengths differ.
std::vector<QuatDemo> align_hemispheres(std::vector<QuatDemo> demos);

/// Generates `count` demos of length `samples` over [0, duration]: a
/// piecewise quintic through the key orientations in the tangent space at
/// keys[0], plus per-demo low-frequency sinusoidal perturbations scaled by
/// noise_scale (vanishing at the endpoints), mapped back through the exp map
/// and hemisphere-aligned. Deterministic for a fixed seed.
std::vector<QuatDemo> generate_min_jerk_demos(
    const std::vector<UnitQuaternion>& keys, double duration, int samples,
    int count, double noise_scale, std::uint64_t seed);

}  // namespace quatkmp::quat
