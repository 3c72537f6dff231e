#include <cmath>

#include "doctest.h"
#include "sohb/errors.hpp"
#include "sohb/rng.hpp"
#include "sohb/rotations.hpp"
#include "sohb/sampling.hpp"

using namespace sohb;

namespace {

Mat3 random_rotation(CounterRng& rng) { return quat_to_rot(sample_uniform_quat(rng)); }

Mat3 random_matrix(CounterRng& rng) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("hat and vee") {
    CHECK(hat(Vec3::Zero()).isZero());
    Mat3 e3;
    e3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    CHECK(hat(Vec3::UnitZ()) == e3);

    CounterRng rng(7, 0);
    for (int k = 0; k < 20; ++k) {
        const Vec3 u(rng.normal(), rng.normal(), rng.normal());
        const Vec3 v(rng.normal(), rng.normal(), rng.normal());
        CHECK((hat(u) * v - u.cross(v)).norm() < 1e-14);
        CHECK((vee(hat(u)) - u).norm() == 0.0);
        CHECK(mat_dot(hat(u), hat(v)) == doctest::Approx(u.dot(v)).epsilon(1e-13));
    }
}

TEST_CASE("mat_dot of rotations") {
    CHECK(mat_dot(Mat3::Identity(), Mat3::Identity()) == 1.5);
    CounterRng rng(8, 0);
    const Mat3 r = random_rotation(rng);
    CHECK(mat_dot(r, r) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("tangent projection") {
    CounterRng rng(9, 0);
    const Mat3 m = random_matrix(rng);
    const Mat3 sym = m + m.transpose();
    const Mat3 skew = m - m.transpose();
    CHECK(project_tangent(Mat3::Identity(), sym).norm() < 1e-14);
    CHECK((project_tangent(Mat3::Identity(), skew) - skew).norm() < 1e-14);

    // A^T P_T(A)M is antisymmetric and P_T is idempotent.
    const Mat3 a = random_rotation(rng);
    const Mat3 p = project_tangent(a, m);
    const Mat3 x = a.transpose() * p;
    CHECK((x + x.transpose()).norm() < 1e-13);
    CHECK((project_tangent(a, p) - p).norm() < 1e-13);
}

TEST_CASE("polar rotation") {
    CHECK((polar_rotation(2.0 * Mat3::Identity()) - Mat3::Identity()).norm() < 1e-14);
    CounterRng rng(10, 0);
    const Mat3 r = random_rotation(rng);
    CHECK((polar_rotation(3.7 * r) - r).norm() < 1e-13);
    CHECK_THROWS_AS(polar_rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), DegenerateAverage);
    CHECK_FALSE(try_polar_rotation(Mat3::Zero()).has_value());

    // Maximizes mat_dot(., M) against random probes.
    const Mat3 m = random_matrix(rng);
    if (m.determinant() > 0.1) {
        const Mat3 best = polar_rotation(m);
        for (int k = 0; k < 1000; ++k) CHECK(mat_dot(random_rotation(rng), m) <= mat_dot(best, m) + 1e-12);
    }
}

TEST_CASE("quaternion to rotation") {
    CHECK(quat_to_rot(UnitQuaternion(1, 0, 0, 0)) == Mat3::Identity());
    CHECK((quat_to_rot(UnitQuaternion(0, 1, 0, 0)) - Vec3(1, -1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);

    CounterRng rng(11, 0);
    for (int k = 0; k < 50; ++k) {
        const UnitQuaternion q = sample_uniform_quat(rng), p = sample_uniform_quat(rng);
        const Mat3 r = quat_to_rot(q);
        CHECK(rotation_defect(r) < 1e-14);
        CHECK((quat_to_rot(-q) - r).norm() < 1e-15);
        CHECK((quat_to_rot(q * p) - r * quat_to_rot(p)).norm() < 1e-13);
        const UnitQuaternion back = rot_to_quat(r);
        CHECK(std::abs(std::abs(back.dot(q)) - 1.0) < 1e-13);
        const Vec3 v(rng.normal(), rng.normal(), rng.normal());
        CHECK((rotate(q, v) - r * v).norm() < 1e-13);
    }
}

TEST_CASE("qtensor and leading eigenvector") {
    const Mat4 expected = Vec4(0.75, -0.25, -0.25, -0.25).asDiagonal();
    CHECK((qtensor(UnitQuaternion()) - expected).norm() < 1e-15);

    CounterRng rng(12, 0);
    for (int k = 0; k < 50; ++k) {
        const UnitQuaternion p = sample_uniform_quat(rng);
        const UnitQuaternion e = max_eigvec(qtensor(p));
        CHECK(std::abs(std::abs(e.dot(p)) - 1.0) < 1e-10);
        const UnitQuaternion s = max_eigvec(4.2 * qtensor(p));
        CHECK(std::abs(std::abs(s.dot(p)) - 1.0) < 1e-10);
    }
    CHECK_THROWS_AS(max_eigvec(Mat4::Zero()), DegenerateAverage);
}

TEST_CASE("mat_dot of Phi images equals qtensor contraction") {
    CounterRng rng(13, 0);
    for (int k = 0; k < 1000; ++k) {
        const UnitQuaternion q = sample_uniform_quat(rng), p = sample_uniform_quat(rng);
        const double d = q.dot(p);
        CHECK(std::abs(0.5 * mat_dot(quat_to_rot(q), quat_to_rot(p)) - (d * d - 0.25)) < 1e-12);
        CHECK(std::abs(contract(qtensor(q), qtensor(p)) - (d * d - 0.25)) < 1e-12);
    }
}

TEST_CASE("rotation angle and distance") {
    CHECK(rotation_angle(Mat3::Identity()) == 0.0);
    CHECK(rotation_angle(angle_axis_matrix(2.5, Vec3::UnitY())) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rotation_distance(angle_axis_matrix(0.3, Vec3::UnitX()), angle_axis_matrix(-0.2, Vec3::UnitX())) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(UnitQuaternion::normalized(Vec4::Zero()), DomainError);
}
