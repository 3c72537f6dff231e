#include "sohb/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sohb/errors.hpp"

namespace sohb {

std::array<int, 3> MacroGrid::coords(std::size_t node) const {
    const int i = static_cast<int>(node % n[0]);
    const std::size_t rest = node / n[0];
    return {i, static_cast<int>(rest % n[1]), static_cast<int>(rest / n[1])};
}

Vec3 MacroGrid::position(std::size_t node) const {
    const auto c = coords(node);
    return {c[0] * h[0], c[1] * h[1], c[2] * h[2]};
}

std::size_t MacroGrid::shift(std::size_t node, int axis, int step) const {
    auto c = coords(node);
    c[axis] = ((c[axis] + step) % n[axis] + n[axis]) % n[axis];
    return index(c[0], c[1], c[2]);
}

double MacroGrid::min_spacing() const {
    double m = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a)
        if (n[a] > 1) m = std::min(m, h[a]);
    return m;
}

void MacroGrid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 1) throw InvalidArgument("macro grid: node counts must be positive");
        if (!(h[a] > 0.0)) throw InvalidArgument("macro grid: spacing must be positive");
    }
}

Mat3 MacroField::rotation(std::size_t node) const {
    if (const auto* m = std::get_if<MatrixOrientations>(&orientation)) return (*m)[node];
    return quat_to_rot(std::get<QuaternionOrientations>(orientation)[node]);
}

Vec3 MacroField::heading(std::size_t node) const {
    if (const auto* m = std::get_if<MatrixOrientations>(&orientation)) return (*m)[node].col(0);
    return rotate(std::get<QuaternionOrientations>(orientation)[node], Vec3::UnitX());
}

MacroField wave_field(const MacroGrid& grid, double amplitude, double rho_amplitude, Representation rep) {
    grid.validate();
    MacroField f;
    f.grid = grid;
    const std::size_t n = grid.size();
    f.rho.resize(n);
    QuaternionOrientations quats(n);
    const UnitQuaternion base = UnitQuaternion::from_angle_axis(0.4, Vec3(0.0, 1.0, 1.0).normalized());
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = grid.coords(i);
        double phase = 0.0;
        for (int a = 0; a < 3; ++a)
            if (grid.n[a] > 1) phase += 2.0 * std::numbers::pi * c[a] / grid.n[a];
        quats[i] = UnitQuaternion::from_angle_axis(amplitude * std::sin(phase), Vec3::UnitZ()) *
                   UnitQuaternion::from_angle_axis(0.75 * amplitude * std::cos(phase), Vec3::UnitX()) * base;
        f.rho[i] = 1.0 + rho_amplitude * std::sin(phase);
    }
    f.orientation = std::move(quats);
    lift_signs(f);
    return rep == Representation::Quaternion ? f : to_matrix_field(f);
}

MacroField to_matrix_field(const MacroField& qf) {
    MacroField out;
    out.grid = qf.grid;
    out.t = qf.t;
    out.rho = qf.rho;
    MatrixOrientations mats(qf.grid.size());
    for (std::size_t i = 0; i < mats.size(); ++i) mats[i] = qf.rotation(i);
    out.orientation = std::move(mats);
    return out;
}

namespace {

void check_shape(const MacroField& f) {
    f.grid.validate();
    const std::size_t n = f.grid.size();
    const std::size_t m = std::visit([](const auto& v) { return v.size(); }, f.orientation);
    if (f.rho.size() != n || m != n) throw InvalidArgument("macro field: array sizes do not match the grid");
}

bool active(const MacroGrid& g, int axis) { return g.n[axis] > 1; }

// Central-difference gradient of a node scalar.
Vec3 gradient(const MacroGrid& g, const std::vector<double>& u, std::size_t node) {
    Vec3 out = Vec3::Zero();
    for (int a = 0; a < 3; ++a)
        if (active(g, a)) out[a] = (u[g.shift(node, a, 1)] - u[g.shift(node, a, -1)]) / (2.0 * g.h[a]);
    return out;
}

// Central-difference divergence of c1 rho heading.
std::vector<double> transport_divergence(const MacroField& f, double c1) {
    const auto& g = f.grid;
    std::vector<double> div(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < 3; ++a) {
            if (!active(g, a)) continue;
            const std::size_t p = g.shift(i, a, 1), m = g.shift(i, a, -1);
            div[i] += c1 * (f.rho[p] * f.heading(p)[a] - f.rho[m] * f.heading(m)[a]) / (2.0 * g.h[a]);
        }
    return div;
}

}  // namespace

OrientationDerivatives orientation_derivatives(const MacroField& field) {
    check_shape(field);
    const auto* mats = std::get_if<MatrixOrientations>(&field.orientation);
    if (!mats) throw InvalidArgument("orientation_derivatives: matrix field required");
    const auto& g = field.grid;
    OrientationDerivatives out;
    out.Dx.assign(g.size(), Mat3::Zero());
    out.delta.assign(g.size(), 0.0);
    out.r.assign(g.size(), Vec3::Zero());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Mat3& lam = (*mats)[i];
        for (int a = 0; a < 3; ++a) {
            if (!active(g, a)) continue;
            const Mat3 d = ((*mats)[g.shift(i, a, 1)] - (*mats)[g.shift(i, a, -1)]) / (2.0 * g.h[a]);
            out.Dx[i].col(a) = vee(d * lam.transpose());
        }
        out.delta[i] = out.Dx[i].trace();
        out.r[i] = vee(out.Dx[i] - out.Dx[i].transpose());
    }
    return out;
}

void lift_signs(MacroField& field) {
    auto* quats = std::get_if<QuaternionOrientations>(&field.orientation);
    if (!quats) return;
    const auto& g = field.grid;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t node = g.index(i, j, k);
                std::size_t prev;
                if (i > 0)
                    prev = g.index(i - 1, j, k);
                else if (j > 0)
                    prev = g.index(i, j - 1, k);
                else if (k > 0)
                    prev = g.index(i, j, k - 1);
                else
                    continue;
                if ((*quats)[node].dot((*quats)[prev]) < 0.0) (*quats)[node] = -(*quats)[node];
            }
}

void check_sign_continuity(const MacroField& field) {
    const auto* quats = std::get_if<QuaternionOrientations>(&field.orientation);
    if (!quats) return;
    const auto& g = field.grid;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < 3; ++a) {
            if (!active(g, a)) continue;
            const std::size_t p = g.shift(i, a, 1);
            if ((*quats)[i].dot((*quats)[p]) < 0.0)
                throw SignDiscontinuity("quaternion field changes sign between nodes " + std::to_string(i) + " and " +
                                        std::to_string(p));
        }
}

RelativeDerivatives rel_derivative(const MacroField& field) {
    check_shape(field);
    const auto* quats = std::get_if<QuaternionOrientations>(&field.orientation);
    if (!quats) throw InvalidArgument("rel_derivative: quaternion field required");
    check_sign_continuity(field);
    const auto& g = field.grid;
    RelativeDerivatives out;
    out.rel.assign(g.size(), {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
    out.divergence.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec4 qc = (*quats)[i].conj().vec();
        for (int a = 0; a < 3; ++a) {
            if (!active(g, a)) continue;
            const Vec4 d = ((*quats)[g.shift(i, a, 1)].vec() - (*quats)[g.shift(i, a, -1)].vec()) / (2.0 * g.h[a]);
            const Vec4 prod = quat_mul(d, qc);
            out.max_real_part = std::max(out.max_real_part, std::abs(prod[0]));
            out.rel[i][a] = prod.tail<3>();
            out.divergence[i] += out.rel[i][a][a];
        }
    }
    return out;
}

namespace {

// Angular velocity ω with ρ ∂tΛ = ρ[ω]×Λ - R_Λ, i.e. the part of the
// Λ-equation without the time derivative, divided by ρ and negated.
std::vector<Vec3> matrix_rate(const MacroField& f, const GciConstants& k, const OrientationDerivatives& od) {
    const auto& g = f.grid;
    std::vector<Vec3> omega(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 l = f.heading(i);
        const Vec3 grad_rho = gradient(g, f.rho, i);
        omega[i] = -k.c2 * (od.Dx[i] * l) -
                   (l.cross(2.0 * k.c3 * grad_rho + k.c4 * f.rho[i] * od.r[i]) + k.c4 * f.rho[i] * od.delta[i] * l) /
                       f.rho[i];
    }
    return omega;
}

// Half angular velocity for the quaternion system: ∂t q = ω_half q.
std::vector<Vec3> quaternion_rate(const MacroField& f, const GciConstants& k, const RelativeDerivatives& rd) {
    const auto& g = f.grid;
    std::vector<Vec3> omega(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 l = f.heading(i);
        const Vec3 grad_rho = gradient(g, f.rho, i);
        Vec3 transport = Vec3::Zero(), contraction;
        for (int a = 0; a < 3; ++a) {
            transport += l[a] * rd.rel[i][a];
            contraction[a] = rd.rel[i][a].dot(l);
        }
        omega[i] = -k.c2_prime * transport - (k.c3 / f.rho[i]) * l.cross(grad_rho) -
                   k.c4 * (contraction + rd.divergence[i] * l);
    }
    return omega;
}

void require_positive_density(const MacroField& f) {
    for (double r : f.rho)
        if (!(r > 0.0)) throw DomainError("macro: density must be positive at every node");
}

}  // namespace

MatrixResidual residual_matrix(const MacroField& field, const GciConstants& k, const MacroTimeDerivatives& dt) {
    const auto od = orientation_derivatives(field);
    const auto& mats = std::get<MatrixOrientations>(field.orientation);
    const auto& g = field.grid;
    MatrixResidual out;
    out.rho = transport_divergence(field, k.c1);
    out.lambda.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!dt.rho.empty()) out.rho[i] += dt.rho[i];
        const Mat3& lam = mats[i];
        const Vec3 l = lam.col(0);
        const Vec3 grad_rho = gradient(g, field.rho, i);
        // (ℓ·∇)Λ = [𝒟ℓ]×Λ
        Mat3 rate = k.c2 * hat(od.Dx[i] * l) * lam;
        if (!dt.lambda.empty()) rate += dt.lambda[i];
        const Vec3 spin = l.cross(2.0 * k.c3 * grad_rho + k.c4 * field.rho[i] * od.r[i]) +
                          k.c4 * field.rho[i] * od.delta[i] * l;
        out.lambda[i] = field.rho[i] * rate + hat(spin) * lam;
        const Mat3 normal = out.lambda[i] - project_tangent(lam, out.lambda[i]);
        out.tangency_violation = std::max(out.tangency_violation, normal.norm());
    }
    return out;
}

QuaternionResidual residual_quaternion(const MacroField& field, const GciConstants& k,
                                       const MacroTimeDerivatives& dt) {
    const auto rd = rel_derivative(field);
    const auto& quats = std::get<QuaternionOrientations>(field.orientation);
    const auto& g = field.grid;
    QuaternionResidual out;
    out.rho = transport_divergence(field, k.c1);
    out.q.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!dt.rho.empty()) out.rho[i] += dt.rho[i];
        const Vec4 q = quats[i].vec();
        const Vec3 l = field.heading(i);
        const Vec3 grad_rho = gradient(g, field.rho, i);
        Vec3 transport = Vec3::Zero(), contraction;
        for (int a = 0; a < 3; ++a) {
            transport += l[a] * rd.rel[i][a];
            contraction[a] = rd.rel[i][a].dot(l);
        }
        Vec4 rate = k.c2_prime * imag_mul(transport, q);
        if (!dt.q.empty()) rate += dt.q[i];
        out.q[i] = field.rho[i] * rate + k.c3 * imag_mul(l.cross(grad_rho), q) +
                   k.c4 * field.rho[i] * imag_mul(contraction + rd.divergence[i] * l, q);
        out.orthogonality_violation = std::max(out.orthogonality_violation, std::abs(out.q[i].dot(q)));
    }
    return out;
}

double max_stable_dt(const MacroGrid& grid, const GciConstants& k, double sigma) {
    const double speed = std::max({k.c1, k.c2, k.c2_prime, 1.0});
    return sigma * grid.min_spacing() / speed;
}

double total_mass(const MacroField& field) {
    double m = 0.0;
    for (double r : field.rho) m += r;
    return m * field.grid.cell_volume();
}

namespace {

struct Tendency {
    std::vector<double> rho;
    std::vector<Mat3> lambda;
    std::vector<Vec4> q;
};

Tendency tendency(const MacroField& f, const GciConstants& k, const MacroStepOptions& opt) {
    const auto& g = f.grid;
    const std::size_t n = g.size();
    Tendency out;
    // Conservative face fluxes: F_{i+1/2} = c1 (ρℓ_i + ρℓ_{i+1}) / 2 - ν h (ρ_{i+1} - ρ_i).
    out.rho.assign(n, 0.0);
    for (int a = 0; a < 3; ++a) {
        if (!active(g, a)) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t p = g.shift(i, a, 1);
            const double flux = 0.5 * k.c1 * (f.rho[i] * f.heading(i)[a] + f.rho[p] * f.heading(p)[a]) -
                                opt.nu * g.h[a] * (f.rho[p] - f.rho[i]);
            out.rho[i] -= flux / g.h[a];
            out.rho[p] += flux / g.h[a];
        }
    }
    if (const auto* mats = std::get_if<MatrixOrientations>(&f.orientation)) {
        const auto omega = matrix_rate(f, k, orientation_derivatives(f));
        out.lambda.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.lambda[i] = hat(omega[i]) * (*mats)[i];
            for (int a = 0; a < 3; ++a)
                if (active(g, a))
                    out.lambda[i] +=
                        opt.nu * ((*mats)[g.shift(i, a, 1)] - 2.0 * (*mats)[i] + (*mats)[g.shift(i, a, -1)]);
        }
    } else {
        const auto& quats = std::get<QuaternionOrientations>(f.orientation);
        const auto omega = quaternion_rate(f, k, rel_derivative(f));
        out.q.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.q[i] = imag_mul(omega[i], quats[i].vec());
            for (int a = 0; a < 3; ++a)
                if (active(g, a))
                    out.q[i] += opt.nu * (quats[g.shift(i, a, 1)].vec() - 2.0 * quats[i].vec() +
                                          quats[g.shift(i, a, -1)].vec());
        }
    }
    return out;
}

// base + dt * (w1 t1 + w2 t2), then retraction.
MacroField combine(const MacroField& base, double dt, const Tendency& t1, double w1, const Tendency* t2, double w2) {
    MacroField out = base;
    const std::size_t n = base.grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        double dr = w1 * t1.rho[i];
        if (t2) dr += w2 * t2->rho[i];
        out.rho[i] += dt * dr;
    }
    if (auto* mats = std::get_if<MatrixOrientations>(&out.orientation)) {
        for (std::size_t i = 0; i < n; ++i) {
            Mat3 d = w1 * t1.lambda[i];
            if (t2) d += w2 * t2->lambda[i];
            (*mats)[i] = reorthonormalize((*mats)[i] + dt * d);
        }
    } else {
        auto& quats = std::get<QuaternionOrientations>(out.orientation);
        for (std::size_t i = 0; i < n; ++i) {
            Vec4 d = w1 * t1.q[i];
            if (t2) d += w2 * t2->q[i];
            quats[i] = UnitQuaternion::normalized(quats[i].vec() + dt * d);
        }
    }
    return out;
}

}  // namespace

void step_macro(MacroField& field, double dt, const GciConstants& k, const MacroStepOptions& opt) {
    check_shape(field);
    if (!(dt > 0.0)) throw InvalidArgument("step_macro: dt must be positive");
    const double limit = max_stable_dt(field.grid, k, opt.sigma);
    if (dt > limit)
        throw CflViolation("dt=" + std::to_string(dt) + " exceeds the stability limit " + std::to_string(limit));
    require_positive_density(field);
    const Tendency k1 = tendency(field, k, opt);
    const MacroField stage = combine(field, dt, k1, 1.0, nullptr, 0.0);
    require_positive_density(stage);
    const Tendency k2 = tendency(stage, k, opt);
    const double t = field.t;
    field = combine(field, dt, k1, 0.5, &k2, 0.5);
    field.t = t + dt;
}

}  // namespace sohb
