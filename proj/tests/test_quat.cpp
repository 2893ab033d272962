#include "quatkmp/quat.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "quatkmp/errors.hpp"
#include "quatkmp/rng.hpp"

using namespace quatkmp;
using quat::UnitQuaternion;

namespace {

constexpr double kPi = std::numbers::pi;

UnitQuaternion random_unit(Rng& rng) {
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) v[i] = rng.normal();
  return UnitQuaternion(v[0], v.tail<3>());
}

quat::Tangent3 random_tangent(Rng& rng, double max_norm) {
  Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
  dir.normalize();
  return rng.uniform() * max_norm * dir;
}

double coeff_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  return (a.coeffs() - b.coeffs()).norm();
}

}  // namespace

TEST_CASE("product: identity and inverse") {
  Rng rng(11);
  const UnitQuaternion q = random_unit(rng);
  CHECK(coeff_distance(quat::product(quat::identity_quat(), q), q) < 1e-12);
  CHECK(coeff_distance(quat::product(q, quat::conjugate(q)),
                       quat::identity_quat()) < 1e-12);
}

TEST_CASE("product: hand-evaluated Hamilton product") {
  const UnitQuaternion i(0, 1, 0, 0);
  const UnitQuaternion j(0, 0, 1, 0);
  const UnitQuaternion k = quat::product(i, j);
  CHECK(std::abs(k.w()) < 1e-14);
  CHECK(std::abs(k.x()) < 1e-14);
  CHECK(std::abs(k.y()) < 1e-14);
  CHECK(std::abs(k.z() - 1.0) < 1e-14);
}

TEST_CASE("conjugate: involution and sign flip") {
  const UnitQuaternion q(0.7071, 0.7071, 0, 0);
  const UnitQuaternion qc = quat::conjugate(q);
  CHECK(qc.w() == doctest::Approx(q.w()));
  CHECK(qc.x() == doctest::Approx(-q.x()));
  CHECK(coeff_distance(quat::conjugate(quat::identity_quat()),
                       quat::identity_quat()) == 0.0);
  Rng rng(3);
  const UnitQuaternion r = random_unit(rng);
  CHECK(coeff_distance(quat::conjugate(quat::conjugate(r)), r) < 1e-15);
}

TEST_CASE("log map: branch values and domain error") {
  CHECK(quat::log_map(quat::identity_quat()).norm() == 0.0);
  const quat::Tangent3 z = quat::log_map(UnitQuaternion(0, 1, 0, 0));
  CHECK(z.x() == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(z.y() == 0.0);
  CHECK(z.z() == 0.0);
  CHECK_THROWS_AS(quat::log_map(UnitQuaternion(-1.0, 1e-13, 0, 0)), DomainError);
}

TEST_CASE("exp map: branch values and domain error") {
  CHECK(coeff_distance(quat::exp_map(quat::Tangent3::Zero()),
                       quat::identity_quat()) == 0.0);
  const UnitQuaternion q = quat::exp_map(quat::Tangent3(kPi / 2, 0, 0));
  CHECK(std::abs(q.w()) < 1e-14);
  CHECK(std::abs(q.x() - 1.0) < 1e-14);
  CHECK_THROWS_AS(quat::exp_map(quat::Tangent3(kPi, 0, 0)), DomainError);
  CHECK_THROWS_AS(quat::exp_map(quat::Tangent3(4.0, 0, 0)), DomainError);
}

TEST_CASE("exp/log round trips on random samples") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    const quat::Tangent3 z = random_tangent(rng, kPi - 0.05);
    CHECK((quat::log_map(quat::exp_map(z)) - z).norm() < 1e-9);

    UnitQuaternion q = random_unit(rng);
    if (quat::is_near_antipode(q)) q = q.negated();
    CHECK(coeff_distance(quat::exp_map(quat::log_map(q)), q) < 1e-9);
  }
}

TEST_CASE("unit norm preserved by operation chains") {
  Rng rng(77);
  UnitQuaternion q = random_unit(rng);
  for (int i = 0; i < 200; ++i) {
    q = quat::product(q, random_unit(rng));
    q = quat::integrate(q, quat::AngularVelocity(rng.normal(), rng.normal(),
                                                 rng.normal()),
                        0.01);
    CHECK(std::abs(q.coeffs().norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("distance: branch values") {
  Rng rng(5);
  const UnitQuaternion q = random_unit(rng);
  CHECK(quat::distance(q, q) < 1e-12);
  CHECK(quat::distance(q, q.negated()) == doctest::Approx(2 * kPi));
  CHECK(quat::distance(quat::identity_quat(), UnitQuaternion(0, 1, 0, 0)) ==
        doctest::Approx(kPi));
}

TEST_CASE("distance: symmetry, range, left invariance") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion a = random_unit(rng);
    const UnitQuaternion b = random_unit(rng);
    const UnitQuaternion r = random_unit(rng);
    const double d = quat::distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 2 * kPi + 1e-12);
    CHECK(quat::distance(b, a) == doctest::Approx(d).epsilon(1e-10));
    CHECK(quat::distance(quat::product(r, a), quat::product(r, b)) ==
          doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("integrate: zero velocity and hand-evaluated step") {
  Rng rng(13);
  const UnitQuaternion q = random_unit(rng);
  CHECK(coeff_distance(
            quat::integrate(q, quat::AngularVelocity::Zero(), 0.1), q) < 1e-12);
  const UnitQuaternion rotated = quat::integrate(
      quat::identity_quat(), quat::AngularVelocity(kPi, 0, 0), 1.0);
  CHECK(coeff_distance(rotated, UnitQuaternion(0, 1, 0, 0)) < 1e-12);
}

TEST_CASE("integrate and differentiate are mutual inverses") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    UnitQuaternion q = random_unit(rng);
    const quat::AngularVelocity omega(2 * rng.normal(), 2 * rng.normal(),
                                      2 * rng.normal());
    const double dt = 0.01 + 0.2 * rng.uniform();
    if ((0.5 * dt * omega).norm() >= kPi - 0.05) continue;
    const UnitQuaternion next = quat::integrate(q, omega, dt);
    CHECK((quat::angular_velocity(q, next, dt) - omega).norm() < 1e-9);
  }
}

TEST_CASE("differentiate: identical quaternions give zero") {
  Rng rng(19);
  const UnitQuaternion q = random_unit(rng);
  CHECK(quat::angular_velocity(q, q, 0.05).norm() < 1e-9);
}

TEST_CASE("constant tangent increments give constant angular velocity") {
  const quat::Tangent3 step(0.013, -0.007, 0.004);
  const double dt = 0.01;
  Rng rng(23);
  const UnitQuaternion base = random_unit(rng);
  const quat::AngularVelocity expected = 2.0 * step / dt;
  for (int n = 0; n < 60; ++n) {
    const UnitQuaternion a =
        quat::product(quat::exp_map(double(n) * step), base);
    const UnitQuaternion b =
        quat::product(quat::exp_map(double(n + 1) * step), base);
    CHECK((quat::angular_velocity(a, b, dt) - expected).norm() < 1e-9);
  }
}

namespace {

quat::QuatDemo smooth_demo(const quat::Tangent3& direction, int samples,
                           const UnitQuaternion& base) {
  quat::QuatDemo demo;
  for (int n = 0; n < samples; ++n) {
    const double t = 0.01 * n;
    demo.times.push_back(t);
    demo.quats.push_back(quat::product(quat::exp_map(t * direction), base));
  }
  return demo;
}

}  // namespace

TEST_CASE("align_hemispheres: restores a flipped sample") {
  quat::QuatDemo demo = smooth_demo(quat::Tangent3(0.5, 0.2, -0.1), 50,
                                    quat::identity_quat());
  const quat::QuatDemo original = demo;
  demo.quats[20] = demo.quats[20].negated();
  const auto aligned = quat::align_hemispheres({demo});
  for (int n = 0; n < 50; ++n) {
    CHECK((aligned[0].quats[n].coeffs() - original.quats[n].coeffs()).norm() <
          1e-15);
  }
}

TEST_CASE("align_hemispheres: aligned demos pass through unchanged") {
  const quat::QuatDemo a = smooth_demo(quat::Tangent3(0.4, 0, 0.1), 40,
                                       quat::identity_quat());
  const quat::QuatDemo b = smooth_demo(quat::Tangent3(0.42, 0.02, 0.1), 40,
                                       quat::identity_quat());
  const auto aligned = quat::align_hemispheres({a, b});
  for (int n = 0; n < 40; ++n) {
    CHECK((aligned[0].quats[n].coeffs() - a.quats[n].coeffs()).norm() == 0.0);
    CHECK((aligned[1].quats[n].coeffs() - b.quats[n].coeffs()).norm() == 0.0);
  }
  // Both assumptions hold strictly after alignment.
  for (const auto& demo : aligned) {
    for (int n = 1; n < 40; ++n) {
      CHECK(demo.quats[n - 1].dot(demo.quats[n]) > 0.0);
    }
  }
  for (int n = 0; n < 40; ++n) {
    CHECK(aligned[0].quats[n].dot(aligned[1].quats[n]) > 0.0);
  }
}

TEST_CASE("align_hemispheres: whole-demo sign flips are canonicalized") {
  const quat::QuatDemo a = smooth_demo(quat::Tangent3(0.3, -0.2, 0.1), 30,
                                       quat::identity_quat());
  quat::QuatDemo b = a;
  for (auto& q : b.quats) q = q.negated();
  const auto aligned = quat::align_hemispheres({a, b});
  for (int n = 0; n < 30; ++n) {
    CHECK(aligned[0].quats[n].dot(aligned[1].quats[n]) > 0.0);
  }
}

TEST_CASE("align_hemispheres: irreconcilable demos are rejected") {
  // Both demos start at identity but one travels past 90 degrees away from
  // the other, so no sign assignment can keep every co-timed pair positive.
  const quat::QuatDemo a = smooth_demo(quat::Tangent3(0.1, 0, 0), 50,
                                       quat::identity_quat());
  const quat::QuatDemo b = smooth_demo(quat::Tangent3(4.5, 0, 0), 50,
                                       quat::identity_quat());
  CHECK_THROWS_AS(quat::align_hemispheres({a, b}), AlignmentError);
}

TEST_CASE("align_hemispheres: mismatched lengths are rejected") {
  const quat::QuatDemo a = smooth_demo(quat::Tangent3(0.1, 0, 0), 30,
                                       quat::identity_quat());
  const quat::QuatDemo b = smooth_demo(quat::Tangent3(0.1, 0, 0), 20,
                                       quat::identity_quat());
  CHECK_THROWS_AS(quat::align_hemispheres({a, b}), DimError);
}

namespace {

std::vector<UnitQuaternion> demo_keys() {
  return {quat::identity_quat(), quat::exp_map(quat::Tangent3(0.5, -0.3, 0.2)),
          quat::exp_map(quat::Tangent3(0.9, 0.2, -0.4))};
}

}  // namespace

TEST_CASE("min-jerk demos: zero noise gives identical demos") {
  const auto demos = quat::generate_min_jerk_demos(demo_keys(), 10.0, 200, 3,
                                                   0.0, 42);
  REQUIRE(demos.size() == 3);
  for (int n = 0; n < 200; ++n) {
    CHECK((demos[0].quats[n].coeffs() - demos[1].quats[n].coeffs()).norm() ==
          0.0);
    CHECK((demos[0].quats[n].coeffs() - demos[2].quats[n].coeffs()).norm() ==
          0.0);
  }
}

TEST_CASE("min-jerk demos: endpoints reach the first and last keys") {
  const auto keys = demo_keys();
  // Exact endpoints without noise; within a noise-proportional bound with it.
  for (const auto& demo :
       quat::generate_min_jerk_demos(keys, 10.0, 300, 4, 0.0, 7)) {
    CHECK(quat::distance(demo.quats.front(), keys.front()) < 1e-9);
    CHECK(quat::distance(demo.quats.back(), keys.back()) < 1e-9);
  }
  const double noise = 0.02;
  for (const auto& demo :
       quat::generate_min_jerk_demos(keys, 10.0, 300, 4, noise, 7)) {
    CHECK(quat::distance(demo.quats.front(), keys.front()) < 12 * noise);
    CHECK(quat::distance(demo.quats.back(), keys.back()) < 12 * noise);
  }
}

TEST_CASE("min-jerk demos: zero boundary tangent velocity at zero noise") {
  const std::vector<UnitQuaternion> keys = {
      quat::identity_quat(), quat::exp_map(quat::Tangent3(0.8, -0.5, 0.6))};
  const auto demos =
      quat::generate_min_jerk_demos(keys, 10.0, 2000, 1, 0.0, 1);
  const auto& demo = demos[0];
  const auto zeta = [&](int n) {
    return quat::log_map(
        quat::product(demo.quats[n], quat::conjugate(keys[0])));
  };
  const double dt = demo.times[1] - demo.times[0];
  CHECK(((zeta(1) - zeta(0)) / dt).norm() < 1e-6);
  const int last = static_cast<int>(demo.size()) - 1;
  CHECK(((zeta(last) - zeta(last - 1)) / dt).norm() < 1e-6);
}

TEST_CASE("min-jerk demos: deterministic per seed") {
  const auto a = quat::generate_min_jerk_demos(demo_keys(), 10.0, 100, 2, 0.05, 9);
  const auto b = quat::generate_min_jerk_demos(demo_keys(), 10.0, 100, 2, 0.05, 9);
  const auto c = quat::generate_min_jerk_demos(demo_keys(), 10.0, 100, 2, 0.05, 10);
  double max_ab = 0.0, max_ac = 0.0;
  for (int n = 0; n < 100; ++n) {
    max_ab = std::max(max_ab,
                      (a[0].quats[n].coeffs() - b[0].quats[n].coeffs()).norm());
    max_ac = std::max(max_ac,
                      (a[0].quats[n].coeffs() - c[0].quats[n].coeffs()).norm());
  }
  CHECK(max_ab == 0.0);
  CHECK(max_ac > 1e-6);
}

TEST_CASE("min-jerk demos: antipodal key is rejected") {
  const std::vector<UnitQuaternion> keys = {quat::identity_quat(),
                                            UnitQuaternion(-1.0, 1e-13, 0, 0)};
  CHECK_THROWS_AS(quat::generate_min_jerk_demos(keys, 10.0, 100, 1, 0.0, 1),
                  DomainError);
}
