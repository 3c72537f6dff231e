#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sohb/alignment.hpp"
#include "sohb/errors.hpp"
#include "sohb/rng.hpp"
#include "sohb/sampling.hpp"

using namespace sohb;

namespace {

std::vector<Vec3> random_positions(std::size_t n, const Box& box, CounterRng& rng) {
    std::vector<Vec3> x(n);
    for (auto& p : x) p = Vec3(rng.uniform(), rng.uniform(), rng.uniform()).cwiseProduct(box.lengths);
    return x;
}

double periodic_dist2(const Vec3& a, const Vec3& b, const Box& box) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        double d = std::fmod(std::abs(a[k] - b[k]), box.lengths[k]);
        d = std::min(d, box.lengths[k] - d);
        s += d * d;
    }
    return s;
}

}  // namespace

TEST_CASE("kernel integrates to one") {
    for (KernelShape shape : {KernelShape::Indicator, KernelShape::SmoothBump}) {
        const Kernel k(1.3, shape);
        const int n = 20000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = 1.3 * (i + 0.5) / n;
            sum += 4.0 * std::numbers::pi * r * r * k(r * r) * (1.3 / n);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(k(1.3 * 1.3) == 0.0);
    }
}

TEST_CASE("cell grid matches brute force") {
    CounterRng rng(21, 0);
    for (const Vec3 lengths : {Vec3(8, 8, 8), Vec3(2.0, 2.5, 9.0), Vec3(3.1, 4.7, 2.2)}) {
        const Box box{lengths};
        const auto x = random_positions(300, box, rng);
        const CellGrid grid = CellGrid::build(x, box, 1.0);
        for (std::size_t n = 0; n < x.size(); ++n) {
            std::vector<std::size_t> expected;
            for (std::size_t m = 0; m < x.size(); ++m)
                if (m != n && periodic_dist2(x[n], x[m], box) < 1.0) expected.push_back(m);
            REQUIRE(grid.neighbors(n) == expected);
        }
    }
}

TEST_CASE("neighbor cutoff") {
    const Box box{Vec3(10, 10, 10)};
    const double eps = 1e-9;
    std::vector<Vec3> inside{Vec3(1, 1, 1), Vec3(2 - eps, 1, 1)};
    std::vector<Vec3> outside{Vec3(1, 1, 1), Vec3(2 + eps, 1, 1)};
    CHECK(CellGrid::build(inside, box, 1.0).neighbors(0) == std::vector<std::size_t>{1});
    CHECK(CellGrid::build(outside, box, 1.0).neighbors(0).empty());
    // Across the periodic boundary.
    std::vector<Vec3> wrapped{Vec3(0.1, 5, 5), Vec3(9.5, 5, 5)};
    CHECK(CellGrid::build(wrapped, box, 1.0).neighbors(0) == std::vector<std::size_t>{1});
    CHECK_THROWS_AS(CellGrid::build(inside, Box{Vec3(1.5, 10, 10)}, 1.0), BoxTooSmall);
}

TEST_CASE("local averages agree with brute force") {
    CounterRng rng(22, 0);
    const Box box{Vec3(4, 4, 4)};
    const auto x = random_positions(200, box, rng);
    std::vector<UnitQuaternion> q(x.size());
    std::vector<Mat3> a(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        q[n] = sample_uniform_quat(rng);
        a[n] = quat_to_rot(q[n]);
    }
    const Kernel kernel(1.0, KernelShape::SmoothBump);
    const CellGrid grid = CellGrid::build(x, box, 1.0);
    for (std::size_t n = 0; n < x.size(); n += 7) {
        Mat3 j = Mat3::Zero();
        Mat4 qq = Mat4::Zero();
        for (std::size_t m = 0; m < x.size(); ++m) {
            const double w = kernel(periodic_dist2(x[n], x[m], box)) / static_cast<double>(x.size());
            j += w * a[m];
            qq += w * qtensor(q[m]);
        }
        CHECK((average_matrix(n, a, grid, kernel) - j).norm() < 1e-13);
        CHECK((average_qtensor(n, q, grid, kernel) - qq).norm() < 1e-13);
    }
}

TEST_CASE("targets") {
    const Box box{Vec3(10, 10, 10)};
    const Kernel kernel(1.0);
    std::vector<Vec3> x{Vec3(5, 5, 5), Vec3(5.3, 5, 5), Vec3(5, 5.4, 5)};
    const CellGrid grid = CellGrid::build(x, box, 1.0);

    SUBCASE("shared orientation") {
        const UnitQuaternion q = UnitQuaternion::from_angle_axis(1.2, Vec3(0, 0.6, 0.8));
        const std::vector<Mat3> a(3, quat_to_rot(q));
        CHECK((target_rotation(0, a, grid, kernel) - a[0]).norm() < 1e-13);
        const std::vector<UnitQuaternion> mixed{q, -q, q};
        const std::vector<UnitQuaternion> same{q, q, q};
        const UnitQuaternion t1 = target_quaternion(0, mixed, grid, kernel);
        const UnitQuaternion t2 = target_quaternion(0, same, grid, kernel);
        CHECK(std::abs(std::abs(t1.dot(q)) - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(t1.dot(t2)) - 1.0) < 1e-12);
    }
    SUBCASE("maximality and representation agreement") {
        CounterRng rng(23, 0);
        const std::vector<UnitQuaternion> q{sample_uniform_quat(rng), sample_uniform_quat(rng),
                                            sample_uniform_quat(rng)};
        std::vector<Mat3> a;
        for (const auto& p : q) a.push_back(quat_to_rot(p));
        const Mat3 j = average_matrix(0, a, grid, kernel);
        const auto best = try_polar_rotation(j);
        if (best) {
            for (int k = 0; k < 1000; ++k)
                CHECK(mat_dot(quat_to_rot(sample_uniform_quat(rng)), j) <= mat_dot(*best, j) + 1e-12);
            CHECK((quat_to_rot(target_quaternion(0, q, grid, kernel)) - *best).norm() < 1e-9);
        }
    }
    SUBCASE("negative determinant") {
        const std::vector<Mat3> a{Mat3::Identity(), Vec3(1, -1, -1).asDiagonal().toDenseMatrix(),
                                  Vec3(-1, 1, -1).asDiagonal().toDenseMatrix()};
        CHECK(average_matrix(0, a, grid, kernel).determinant() < 0.0);
        CHECK_THROWS_AS(target_rotation(0, a, grid, kernel), DegenerateAverage);
        const std::vector<UnitQuaternion> q{UnitQuaternion(1, 0, 0, 0), UnitQuaternion(0, 1, 0, 0),
                                            UnitQuaternion(0, 0, 1, 0)};
        CHECK_THROWS_AS(target_quaternion(0, q, grid, kernel), DegenerateAverage);
    }
}
