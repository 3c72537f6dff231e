#pragma once

#include <array>
#include <vector>

#include "sohb/gci.hpp"
#include "sohb/micro.hpp"

namespace sohb {

/// Uniform periodic grid with n[a] nodes of spacing h[a] along axis a.
/// An axis with a single node carries no variation.
struct MacroGrid {
    std::array<int, 3> n{1, 1, 1};
    Vec3 h = Vec3::Ones();

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    std::array<int, 3> coords(std::size_t node) const;
    Vec3 position(std::size_t node) const;
    /// Periodic neighbour of `node` shifted by `step` along `axis`.
    std::size_t shift(std::size_t node, int axis, int step) const;
    double cell_volume() const { return h[0] * h[1] * h[2]; }
    double min_spacing() const;
    void validate() const;
};

/// Density and orientation on a MacroGrid, in either representation.
struct MacroField {
    MacroGrid grid;
    double t = 0.0;
    std::vector<double> rho;
    Orientations orientation;

    Representation representation() const {
        return std::holds_alternative<MatrixOrientations>(orientation) ? Representation::Matrix
                                                                       : Representation::Quaternion;
    }
    Mat3 rotation(std::size_t node) const;
    /// Λe₁ or e₁(q̄).
    Vec3 heading(std::size_t node) const;
};

/// Smooth periodic field with phase φ = 2π Σ_a x_a / L_a over the active axes:
/// q̄ = exp(a sin φ · k/2) exp(0.75 a cos φ · i/2) q_c with a fixed q_c, and
/// ρ = 1 + b sin φ. Sign-continuous, and no winding, so it lifts to a
/// periodic quaternion field.
MacroField wave_field(const MacroGrid& grid, double amplitude, double rho_amplitude, Representation rep);

/// Φ-image of a quaternion field.
MacroField to_matrix_field(const MacroField& quaternion_field);

/// 𝒟ₓ(Λ) per node with δₓ = tr 𝒟ₓ and [rₓ]× = 𝒟ₓ - 𝒟ₓᵀ.
struct OrientationDerivatives {
    std::vector<Mat3> Dx;
    std::vector<double> delta;
    std::vector<Vec3> r;
};

/// Central differences of Λ along each axis; column j of 𝒟ₓ is the axial
/// vector of the antisymmetric part of (∂ⱼΛ)Λᵀ.
OrientationDerivatives orientation_derivatives(const MacroField& field);

/// Relative derivatives (∂ᵢq)q* per node and axis.
struct RelativeDerivatives {
    std::vector<std::array<Vec3, 3>> rel;  // imaginary parts, rel[node][axis]
    std::vector<double> divergence;        // sum_i (rel[node][i])_i
    double max_real_part = 0.0;            // discretization residual of Re((∂q)q*)
};

/// Throws SignDiscontinuity if any pair of adjacent nodes has q·q' < 0.
RelativeDerivatives rel_derivative(const MacroField& field);

/// Flips node signs along the sweep x, then y, then z so that each node
/// agrees with its predecessor. Periodic wrap-around is not altered.
void lift_signs(MacroField& field);
/// Throws SignDiscontinuity naming the first offending pair.
void check_sign_continuity(const MacroField& field);

/// Optional time derivatives for residual evaluation; empty vectors mean zero.
struct MacroTimeDerivatives {
    std::vector<double> rho;
    std::vector<Mat3> lambda;
    std::vector<Vec4> q;
};

struct MatrixResidual {
    std::vector<double> rho;
    std::vector<Mat3> lambda;
    /// max over nodes of |R - P_T R| (Frobenius).
    double tangency_violation = 0.0;
};

struct QuaternionResidual {
    std::vector<double> rho;
    std::vector<Vec4> q;
    /// max over nodes of |R · q̄|.
    double orthogonality_violation = 0.0;
};

MatrixResidual residual_matrix(const MacroField& field, const GciConstants& k, const MacroTimeDerivatives& dt = {});
QuaternionResidual residual_quaternion(const MacroField& field, const GciConstants& k,
                                       const MacroTimeDerivatives& dt = {});

struct MacroStepOptions {
    double nu = 0.5;     // artificial viscosity ν h² Δ
    double sigma = 0.5;  // CFL number
};

/// Largest admissible dt: sigma * min h / max(c1, c2, c2', 1).
double max_stable_dt(const MacroGrid& grid, const GciConstants& k, double sigma);

/// One Heun (RK2) step of the SOHB system in the field's representation.
/// Density is advanced in conservative flux form; Λ is re-projected onto SO3
/// and q̄ renormalized at each stage. Throws CflViolation.
void step_macro(MacroField& field, double dt, const GciConstants& k, const MacroStepOptions& opt = {});

/// sum_i ρ_i × cell volume.
double total_mass(const MacroField& field);

}  // namespace sohb
