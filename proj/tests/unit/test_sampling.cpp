#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sohb/estimators.hpp"
#include "sohb/quadrature.hpp"
#include "sohb/rng.hpp"
#include "sohb/rotations.hpp"
#include "sohb/sampling.hpp"

using namespace sohb;

namespace {

constexpr double pi = std::numbers::pi;

// Composite trapezoid of (2/3)(1/2 + cos) against exp((cos - 1)/D) sin^2(theta/2).
double c1_trapezoid(double D, int n = 400000) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double th = pi * i / n;
        const double s = std::sin(0.5 * th);
        const double w = std::exp((std::cos(th) - 1.0) / D) * s * s * ((i == 0 || i == n) ? 0.5 : 1.0);
        num += w * (2.0 / 3.0) * (0.5 + std::cos(th));
        den += w;
    }
    return num / den;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answer") {
    const auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                           {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto pi_digits = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                                {0xa4093822u, 0x299f31d0u});
    CHECK(pi_digits == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams are reproducible and distinct") {
    CounterRng a(5, 17, 3), b(5, 17, 3), c(5, 18, 3), d(5, 17, 4);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
    CounterRng u(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST_CASE("quadrature rules") {
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, pi) == doctest::Approx(2.0).epsilon(1e-10));
    const GaussLegendre gl(16);
    double wsum = 0.0;
    for (double w : gl.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // Exact for degree 2n - 1.
    CHECK(gl.integrate([](double x) { return std::pow(x, 30) + x; }, -1.0, 1.0) ==
          doctest::Approx(2.0 / 31.0).epsilon(1e-13));
    CHECK(GaussLegendre(512).integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("angle density") {
    CHECK(angle_density(0.0, 0.3) == 0.0);
    CHECK(angle_density(pi, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("c1 against an independent quadrature") {
    for (double D : {0.05, 0.2, 1.0, 5.0, 50.0}) {
        CAPTURE(D);
        const double c = c1(D);
        CHECK(c > 0.0);
        CHECK(c < 1.0);
        CHECK(std::abs(c - c1_trapezoid(D)) < 1e-8);
    }
    CHECK(c1(1e-4) > 0.99);
    CHECK(std::abs(c1(1e4)) < 1e-3);
}

TEST_CASE("von Mises angle table") {
    const VonMises vm(1.0);
    CHECK(vm.angle_cdf(0.0) == 0.0);
    CHECK(vm.angle_cdf(pi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vm.cumulative().back() == 1.0);
    double prev = 0.0;
    for (double th = 0.05; th < pi; th += 0.05) {
        const double c = vm.angle_cdf(th);
        CHECK(c >= prev);
        prev = c;
    }
    // Mean angle from the table agrees with direct quadrature.
    const double num = adaptive_simpson([](double t) { return t * angle_density(t, 1.0); }, 0.0, pi);
    const double den = adaptive_simpson([](double t) { return angle_density(t, 1.0); }, 0.0, pi);
    CHECK(mean_angle(1.0) == doctest::Approx(num / den).epsilon(1e-8));
}

TEST_CASE("concentrated samples stay near the center") {
    const VonMises vm(1e-3);
    CounterRng rng(3, 0);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) sum += vm.sample_angle(rng);
    CHECK(sum / 10000 < 0.15);
}

TEST_CASE("sample mean of von Mises rotations is c1 times the center") {
    const double D = 0.7;
    const VonMises vm(D);
    CounterRng rng(4, 0);
    const Mat3 center = angle_axis_matrix(1.1, Vec3(1, 2, 2) / 3.0);
    const int n = 200000;
    std::vector<double> proj(n);
    Mat3 sum = Mat3::Zero();
    for (int i = 0; i < n; ++i) {
        const Mat3 a = vm.sample_rot(center, rng);
        sum += a;
        proj[i] = mat_dot(center, a) / 1.5;
    }
    const MeanStd m = mean_and_error(proj);
    CHECK(std::abs(m.mean - c1(D)) < 4.0 * m.std_error);
    const Mat3 resid = sum / n - c1(D) * center;
    CHECK(resid.cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("matrix and quaternion draws share the angle") {
    const VonMises vm(0.5);
    CounterRng rng(6, 0);
    for (int i = 0; i < 100; ++i) {
        const VonMisesDraw d = vm.draw(rng);
        CHECK((quat_to_rot(d.quaternion()) - d.rotation()).norm() < 1e-13);
        CHECK(rotation_angle(d.rotation()) == doctest::Approx(d.angle).epsilon(1e-9));
    }
}

TEST_CASE("law is invariant under center sign") {
    const VonMises vm(0.5);
    const UnitQuaternion c = UnitQuaternion::from_angle_axis(0.9, Vec3::UnitZ());
    CounterRng r1(2, 0), r2(2, 0);
    for (int i = 0; i < 100; ++i) {
        const UnitQuaternion a = vm.sample_quat(c, r1), b = vm.sample_quat(-c, r2);
        CHECK((quat_to_rot(a) - quat_to_rot(b)).norm() < 1e-14);
    }
}
