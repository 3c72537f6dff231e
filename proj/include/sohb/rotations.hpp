#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sohb {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Thresholds below which an average orientation is considered ill-defined.
///
/// Both are relative: `det_min` is compared against det(M) / (|M|_F / sqrt(3))^3,
/// which equals 1 for any positive multiple of a rotation, and `gap_min`
/// against (lambda_1 - lambda_2) / max|lambda|.
struct DegeneracyTolerance {
    double det_min = 1e-9;
    double gap_min = 1e-9;
};

/// Unit quaternion stored real part first.
struct UnitQuaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    UnitQuaternion() = default;
    UnitQuaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    /// Normalizes `v`; throws DomainError for the zero vector.
    static UnitQuaternion normalized(const Vec4& v);
    /// cos(angle/2) + sin(angle/2) * axis, `axis` assumed unit.
    static UnitQuaternion from_angle_axis(double angle, const Vec3& axis);

    Vec4 vec() const { return {w, x, y, z}; }
    Vec3 imag() const { return {x, y, z}; }
    UnitQuaternion conj() const { return {w, -x, -y, -z}; }
    UnitQuaternion operator-() const { return {-w, -x, -y, -z}; }
    double dot(const UnitQuaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
    double norm() const { return vec().norm(); }
};

/// Hamilton product on raw 4-vectors (w, x, y, z).
Vec4 quat_mul(const Vec4& a, const Vec4& b);
/// Hamilton product of unit quaternions; result renormalized against drift.
UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
/// Quaternion product (pure imaginary v) * q.
Vec4 imag_mul(const Vec3& v, const Vec4& q);
/// Rotates a vector: Im(q v q*).
Vec3 rotate(const UnitQuaternion& q, const Vec3& v);

/// [u]x, the antisymmetric matrix with [u]x v = u x v.
Mat3 hat(const Vec3& u);
/// Axial vector of the antisymmetric part of M.
Vec3 vee(const Mat3& m);
/// A . B = 1/2 tr(A^T B).
double mat_dot(const Mat3& a, const Mat3& b);

/// Orthogonal projection on the tangent space of SO3 at A: 1/2 (M - A M^T A).
Mat3 project_tangent(const Mat3& a, const Mat3& m);

/// Rotation maximizing R -> R . M over SO3 (orthogonal polar factor).
/// Throws DegenerateAverage when det M is not safely positive.
Mat3 polar_rotation(const Mat3& m, const DegeneracyTolerance& tol = {});
/// Non-throwing variant of polar_rotation.
std::optional<Mat3> try_polar_rotation(const Mat3& m, const DegeneracyTolerance& tol = {});
/// Polar factor without the determinant gate; used to pull drifted rotations back to SO3.
Mat3 reorthonormalize(const Mat3& m);

/// Phi(q): the rotation u -> q u q*.
Mat3 quat_to_rot(const UnitQuaternion& q);
/// One of the two preimages of R under Phi (sign canonicalized).
UnitQuaternion rot_to_quat(const Mat3& r);

/// Psi(q) = q (x) q - I4 / 4.
Mat4 qtensor(const UnitQuaternion& q);
/// Contraction Q : Q' = sum_ij Q_ij Q'_ij.
double contract(const Mat4& a, const Mat4& b);

/// Flip so that the first component with |c| > 1e-12 (w, x, y, z order) is positive.
UnitQuaternion canonical_sign(const UnitQuaternion& q);

/// Unit eigenvector of the top eigenvalue, sign-canonicalized.
/// Throws DegenerateAverage when the top eigenvalue is not simple.
UnitQuaternion max_eigvec(const Mat4& q, const DegeneracyTolerance& tol = {});
std::optional<UnitQuaternion> try_max_eigvec(const Mat4& q, const DegeneracyTolerance& tol = {});

/// Rotation angle in [0, pi] of R.
double rotation_angle(const Mat3& r);
/// Geodesic angle between two rotations.
double rotation_distance(const Mat3& a, const Mat3& b);
/// Rodrigues formula.
Mat3 angle_axis_matrix(double angle, const Vec3& axis);

/// Max-entry deviation of R^T R from I and |det R - 1|, whichever is larger.
double rotation_defect(const Mat3& r);

}  // namespace sohb
