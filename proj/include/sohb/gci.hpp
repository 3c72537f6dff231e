#pragma once

#include <string>
#include <vector>

#include "sohb/micro.hpp"
#include "sohb/rotations.hpp"

namespace sohb {

/// Chebyshev series sum_k a_k T_k(r) on [-1, 1].
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    explicit ChebyshevSeries(std::vector<double> coeffs);

    /// Interpolant through values at the Lobatto points cos(pi j / n), j = 0..n.
    static ChebyshevSeries from_lobatto_values(const std::vector<double>& values);

    const std::vector<double>& coeffs() const { return a_; }
    std::size_t degree() const { return a_.empty() ? 0 : a_.size() - 1; }

    double operator()(double r) const;
    ChebyshevSeries derivative() const;

private:
    std::vector<double> a_;
};

/// Collocation nodes cos(pi j / n), j = 0..n (descending from 1 to -1).
std::vector<double> lobatto_nodes(int n);

/// Spectral differentiation matrix on lobatto_nodes(n).
Eigen::MatrixXd chebyshev_diff_matrix(int n);

struct HSolveOptions {
    std::vector<int> ladder{32, 64, 128, 256, 512};
    double tolerance = 1e-6;   // on the weighted residual
    int check_points = 2048;
    double edge = 1e-4;        // residual checked on [-1 + edge, 1 - edge]
};

/// One rung of the refinement ladder.
struct HSolveLevel {
    int n = 0;
    double residual = 0.0;
};

/// h̄ and k̄ for one model and noise level.
///
/// For the gradual model h is the bounded solution of
///   (1-r^2)^{3/2} e^{2r^2/D} (-4r^2/D - 3) h + d/dr[(1-r^2)^{5/2} e^{2r^2/D} h'] = r (1-r^2)^{3/2} e^{2r^2/D}
/// on (-1, 1), represented by a Chebyshev series. For the jump model h̄(r) = r.
class GciProfile {
public:
    static GciProfile jump(double D);
    /// Throws NoConvergence when no rung of the ladder meets the tolerance.
    static GciProfile gradual(double D, const HSolveOptions& opt = {});
    static GciProfile make(Model model, double D);

    Model model() const { return model_; }
    double D() const { return D_; }

    double hbar(double r) const;
    double hbar_prime(double r) const;
    /// h̄(r)/r with the r -> 0 limit h̄'(0).
    double hbar_over_r(double r) const;
    /// k̄(s) = h̄(½√(2s+1)) / (½√(2s+1)) on [-½, 3/2]; DomainError outside.
    double kbar(double s) const;

    /// Weighted ODE residual max |LHS - RHS| on `points` Chebyshev points of
    /// [-1 + edge, 1 - edge]. Zero for the jump model.
    double residual(int points = 2048, double edge = 1e-4) const;
    /// Pointwise weighted residual from the series and its derivatives.
    double residual_at(double r) const;

    const ChebyshevSeries& series() const { return h_; }
    const std::vector<HSolveLevel>& history() const { return history_; }

private:
    GciProfile(Model m, double D) : model_(m), D_(D) {}

    Model model_;
    double D_;
    ChebyshevSeries h_, dh_, d2h_;
    std::vector<HSolveLevel> history_;
};

/// Collocation solve of the h-ODE with a fixed number of intervals n.
ChebyshevSeries solve_h_collocation(double D, int n);

struct GciConstants {
    double D = 1.0;
    Model model = Model::Jump;
    double c1 = 0.0, c2 = 0.0, c2_prime = 0.0, c3 = 0.0, c4 = 0.0;
};

enum class GciQuadrature { AdaptiveSimpson, GaussLegendre512 };

/// The weight m(θ) sin⁴(θ/2) h̄(cos(θ/2)) cos(θ/2), scaled by e^{-3/(2D)}.
double gci_weight(const GciProfile& profile, double theta);

/// ⟨g⟩_w with w = gci_weight by the chosen rule.
double gci_average(const GciProfile& profile, const std::function<double(double)>& g, GciQuadrature rule);

GciConstants compute_constants(const GciProfile& profile, GciQuadrature rule = GciQuadrature::AdaptiveSimpson);
GciConstants compute_constants(double D, Model model);

/// |∫ (P · Λ₀ᵀA) M_{Λ₀}(A) dA| by product quadrature over the rotation angle
/// and the axis sphere. P is given by its axial vector.
double verify_adjoint_jump(const Mat3& lambda0, const Vec3& p, double D);

/// Discrete solve of the jump-model adjoint equation ∫ψM - ψ = P·Λ₀ᵀA on a
/// product quadrature grid of SO3, followed by a least-squares fit of the
/// solution on span{1, P·Λ₀ᵀA}.
struct AdjointSpanFit {
    double constant = 0.0;
    double slope = 0.0;          // expected -1
    double fit_residual = 0.0;   // max-norm of the fit error relative to max|ψ|
    double equation_residual = 0.0;
    std::size_t nodes = 0;
};
AdjointSpanFit adjoint_span_fit(const Mat3& lambda0, const Vec3& p, double D, int n_angle = 12, int n_polar = 8,
                                int n_azimuth = 10);

}  // namespace sohb
