#include <cmath>

#include "doctest.h"
#include "sohb/errors.hpp"
#include "sohb/gci.hpp"
#include "sohb/sampling.hpp"

using namespace sohb;

namespace {

// Second-order finite-difference residual of the h equation on a grid shifted
// half a step from r, built from point values of h only.
double fd_residual(const GciProfile& prof, double r, double step) {
    const double D = prof.D();
    auto weight = [D](double s) { return std::exp(2.0 * s * s / D); };
    auto flux = [&](double s) {
        const double dh = (prof.hbar(s + 0.5 * step) - prof.hbar(s - 0.5 * step)) / step;
        return std::pow(1.0 - s * s, 2.5) * weight(s) * dh;
    };
    const double dflux = (flux(r + 0.5 * step) - flux(r - 0.5 * step)) / step;
    const double base = std::pow(1.0 - r * r, 1.5) * weight(r);
    const double lhs = base * (-4.0 * r * r / D - 3.0) * prof.hbar(r) + dflux;
    return lhs - r * base;
}

}  // namespace

TEST_CASE("gradual profile solves the h equation") {
    for (double D : {0.3, 1.0, 4.0}) {
        CAPTURE(D);
        const GciProfile prof = GciProfile::gradual(D);
        CHECK(prof.residual() <= 1e-6);
        double scale = 0.0;
        for (double r = -0.95; r <= 0.95; r += 0.05) scale = std::max(scale, std::abs(r * std::exp(2 * r * r / D)));
        for (double r = -0.9; r <= 0.9; r += 0.0731) {
            CHECK(std::abs(fd_residual(prof, r, 1e-3)) < 1e-5 * scale);
            CHECK(std::abs(prof.hbar(r) + prof.hbar(-r)) < 1e-8);
        }
        CHECK(prof.hbar(0.5) <= 0.0);
    }
}

TEST_CASE("h solve fails loudly when unresolved") {
    CHECK_THROWS_AS(GciProfile::gradual(0.05), NoConvergence);
}

TEST_CASE("kbar") {
    const GciProfile jump = GciProfile::jump(0.8);
    for (double s = -0.45; s < 1.5; s += 0.1) CHECK(jump.kbar(s) == doctest::Approx(1.0).epsilon(1e-14));

    const GciProfile grad = GciProfile::gradual(0.8);
    for (double s = -0.45; s < 1.5; s += 0.1) CHECK(grad.kbar(s) < 0.0);
    const double r = std::sqrt(0.5);
    CHECK(grad.kbar(0.5) == doctest::Approx(grad.hbar(r) / r).epsilon(1e-12));
    CHECK(std::isfinite(grad.kbar(1.5)));
    CHECK_THROWS_AS(grad.kbar(1.6), DomainError);
    CHECK_THROWS_AS(grad.kbar(-0.6), DomainError);
}

TEST_CASE("macroscopic coefficients") {
    const GciConstants j = compute_constants(0.7, Model::Jump);
    CHECK(j.c3 == 0.35);
    CHECK(j.c1 == c1(0.7));
    CHECK(std::abs((j.c2 - j.c2_prime) - j.c4) < 1e-12);

    const GciProfile prof = GciProfile::jump(1.0);
    const GciConstants a = compute_constants(prof, GciQuadrature::AdaptiveSimpson);
    const GciConstants b = compute_constants(prof, GciQuadrature::GaussLegendre512);
    CHECK(std::abs(a.c2 - b.c2) < 1e-8);
    CHECK(std::abs(a.c4 - b.c4) < 1e-8);

    const GciConstants g = compute_constants(1.0, Model::Gradual);
    CHECK(g.model == Model::Gradual);
    CHECK(std::isfinite(g.c2));
    CHECK(std::abs((g.c2 - g.c2_prime) - g.c4) < 1e-12);
}

TEST_CASE("jump adjoint identity") {
    const Mat3 lambda = angle_axis_matrix(0.9, Vec3(0, 0, 1));
    CHECK(verify_adjoint_jump(lambda, Vec3(0.3, -1.0, 0.5), 1.0) < 1e-8);
    const AdjointSpanFit fit = adjoint_span_fit(lambda, Vec3(0.3, -1.0, 0.5), 1.0);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(fit.fit_residual < 1e-6);
}

TEST_CASE("Chebyshev series") {
    const auto nodes = lobatto_nodes(16);
    std::vector<double> vals;
    for (double x : nodes) vals.push_back(std::pow(x, 5) - 2 * x);
    const ChebyshevSeries s = ChebyshevSeries::from_lobatto_values(vals);
    CHECK(s(0.3) == doctest::Approx(std::pow(0.3, 5) - 0.6).epsilon(1e-13));
    CHECK(s.derivative()(0.3) == doctest::Approx(5 * std::pow(0.3, 4) - 2).epsilon(1e-12));
    const Eigen::MatrixXd d = chebyshev_diff_matrix(16);
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vals.data(), 17);
    const Eigen::VectorXd dv = d * v;
    for (int i = 0; i <= 16; ++i) CHECK(dv[i] == doctest::Approx(5 * std::pow(nodes[i], 4) - 2).epsilon(1e-10));
}
