#include "sohb/rotations.hpp"

#include <algorithm>
#include <cmath>

#include "sohb/errors.hpp"

namespace sohb {

UnitQuaternion UnitQuaternion::normalized(const Vec4& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite quaternion");
    return {v[0] / n, v[1] / n, v[2] / n, v[3] / n};
}

UnitQuaternion UnitQuaternion::from_angle_axis(double angle, const Vec3& axis) {
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), s * axis[0], s * axis[1], s * axis[2]};
}

Vec4 quat_mul(const Vec4& a, const Vec4& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    return UnitQuaternion::normalized(quat_mul(a.vec(), b.vec()));
}

Vec4 imag_mul(const Vec3& v, const Vec4& q) { return quat_mul(Vec4(0.0, v[0], v[1], v[2]), q); }

Vec3 rotate(const UnitQuaternion& q, const Vec3& v) {
    // v + 2 w (u x v) + 2 u x (u x v), u = Im q
    const Vec3 u = q.imag();
    const Vec3 t = 2.0 * u.cross(v);
    return v + q.w * t + u.cross(t);
}

Mat3 hat(const Vec3& u) {
    Mat3 m;
    m << 0.0, -u[2], u[1],
         u[2], 0.0, -u[0],
        -u[1], u[0], 0.0;
    return m;
}

Vec3 vee(const Mat3& m) {
    return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

double mat_dot(const Mat3& a, const Mat3& b) { return 0.5 * a.cwiseProduct(b).sum(); }

Mat3 project_tangent(const Mat3& a, const Mat3& m) { return 0.5 * (m - a * m.transpose() * a); }

namespace {

Mat3 polar_factor(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    // Flip the direction of the smallest singular value when U V^T is improper.
    if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
    return u * v.transpose();
}

bool det_safely_positive(const Mat3& m, const DegeneracyTolerance& tol) {
    const double fro = m.norm();
    const double det = m.determinant();
    const double scale = fro / std::sqrt(3.0);
    return fro > 0.0 && std::isfinite(det) && det > tol.det_min * scale * scale * scale;
}

}  // namespace

std::optional<Mat3> try_polar_rotation(const Mat3& m, const DegeneracyTolerance& tol) {
    if (!det_safely_positive(m, tol)) return std::nullopt;
    return polar_factor(m);
}

Mat3 polar_rotation(const Mat3& m, const DegeneracyTolerance& tol) {
    if (!det_safely_positive(m, tol)) {
        throw DegenerateAverage("polar_rotation: determinant " + std::to_string(m.determinant()) +
                                " not safely positive");
    }
    return polar_factor(m);
}

Mat3 reorthonormalize(const Mat3& m) { return polar_factor(m); }

Mat3 quat_to_rot(const UnitQuaternion& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
    return r;
}

UnitQuaternion rot_to_quat(const Mat3& r) {
    // Shepperd: pick the largest of 4w^2, 4x^2, 4y^2, 4z^2 for stability.
    const double tr = r.trace();
    const double cand[4] = {1.0 + tr, 1.0 + 2 * r(0, 0) - tr, 1.0 + 2 * r(1, 1) - tr, 1.0 + 2 * r(2, 2) - tr};
    const int k = static_cast<int>(std::max_element(cand, cand + 4) - cand);
    const double s = 2.0 * std::sqrt(std::max(cand[k], 0.0));
    Vec4 q;
    switch (k) {
        case 0: q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s; break;
        case 1: q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s; break;
        case 2: q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s; break;
        default: q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s; break;
    }
    return canonical_sign(UnitQuaternion::normalized(q));
}

Mat4 qtensor(const UnitQuaternion& q) {
    const Vec4 v = q.vec();
    return v * v.transpose() - 0.25 * Mat4::Identity();
}

double contract(const Mat4& a, const Mat4& b) { return a.cwiseProduct(b).sum(); }

UnitQuaternion canonical_sign(const UnitQuaternion& q) {
    for (double c : {q.w, q.x, q.y, q.z}) {
        if (std::abs(c) > 1e-12) return c > 0.0 ? q : -q;
    }
    return q;
}

std::optional<UnitQuaternion> try_max_eigvec(const Mat4& q, const DegeneracyTolerance& tol) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(q);
    if (es.info() != Eigen::Success) return std::nullopt;
    const Vec4& ev = es.eigenvalues();  // ascending
    const double scale = ev.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !(ev[3] - ev[2] > tol.gap_min * scale)) return std::nullopt;
    return canonical_sign(UnitQuaternion::normalized(es.eigenvectors().col(3)));
}

UnitQuaternion max_eigvec(const Mat4& q, const DegeneracyTolerance& tol) {
    auto r = try_max_eigvec(q, tol);
    if (!r) throw DegenerateAverage("max_eigvec: top eigenvalue is not simple");
    return *r;
}

double rotation_angle(const Mat3& r) {
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    // acos loses precision near 0; use the antisymmetric part there.
    const double s = vee(r).norm();
    return std::atan2(s, c);
}

double rotation_distance(const Mat3& a, const Mat3& b) { return rotation_angle(a.transpose() * b); }

Mat3 angle_axis_matrix(double angle, const Vec3& axis) {
    const Mat3 k = hat(axis);
    return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

double rotation_defect(const Mat3& r) {
    const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    return std::max(orth, std::abs(r.determinant() - 1.0));
}

}  // namespace sohb
