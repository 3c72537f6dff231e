#include "sohb/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sohb/errors.hpp"
#include "sohb/quadrature.hpp"

namespace sohb {

namespace {

double bump(double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; }

}  // namespace

Kernel::Kernel(double radius, KernelShape shape) : radius_(radius), shape_(shape) {
    if (!(radius > 0.0)) throw InvalidArgument("Kernel: radius must be positive");
    const double r3 = radius * radius * radius;
    if (shape == KernelShape::Indicator) {
        norm_ = 1.0 / (4.0 / 3.0 * std::numbers::pi * r3);
    } else {
        const double radial = adaptive_simpson([](double s) { return s * s * bump(s * s); }, 0.0, 1.0);
        norm_ = 1.0 / (4.0 * std::numbers::pi * r3 * radial);
    }
}

double Kernel::operator()(double r2) const {
    const double rr = radius_ * radius_;
    if (r2 >= rr) return 0.0;
    return shape_ == KernelShape::Indicator ? norm_ : norm_ * bump(r2 / rr);
}

Vec3 Box::wrap(const Vec3& x) const {
    Vec3 y;
    for (int k = 0; k < 3; ++k) {
        double v = std::fmod(x[k], lengths[k]);
        if (v < 0.0) v += lengths[k];
        if (v >= lengths[k]) v = 0.0;  // fmod of tiny negatives rounds up to L
        y[k] = v;
    }
    return y;
}

Vec3 Box::min_image(const Vec3& d) const {
    Vec3 r;
    for (int k = 0; k < 3; ++k) r[k] = d[k] - lengths[k] * std::nearbyint(d[k] / lengths[k]);
    return r;
}

std::array<int, 3> CellGrid::cell_of(const Vec3& x) const {
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = std::min(static_cast<int>(x[k] / cell_size_[k]), dims_[k] - 1);
    return c;
}

CellGrid CellGrid::build(std::span<const Vec3> positions, const Box& box, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("CellGrid: radius must be positive");
    for (int k = 0; k < 3; ++k) {
        if (box.lengths[k] < 2.0 * radius) {
            throw BoxTooSmall("box length " + std::to_string(box.lengths[k]) + " is below 2R = " +
                              std::to_string(2.0 * radius));
        }
    }
    CellGrid g;
    g.box_ = box;
    g.radius_ = radius;
    for (int k = 0; k < 3; ++k) {
        g.dims_[k] = std::max(1, static_cast<int>(std::floor(box.lengths[k] / radius)));
        g.cell_size_[k] = box.lengths[k] / g.dims_[k];
        std::vector<int> offs;
        for (int d : {-1, 0, 1}) {
            const int wrapped = ((d % g.dims_[k]) + g.dims_[k]) % g.dims_[k];
            const bool seen = std::any_of(offs.begin(), offs.end(), [&](int o) {
                return ((o % g.dims_[k]) + g.dims_[k]) % g.dims_[k] == wrapped;
            });
            if (!seen) offs.push_back(d);
        }
        g.offsets_[k] = std::move(offs);
    }
    const std::size_t n = positions.size();
    g.positions_.resize(n);
    g.particle_cell_.resize(n);
    const std::size_t ncells = static_cast<std::size_t>(g.dims_[0]) * g.dims_[1] * g.dims_[2];
    std::vector<std::size_t> counts(ncells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        g.positions_[i] = box.wrap(positions[i]);
        g.particle_cell_[i] = g.cell_of(g.positions_[i]);
        const auto& c = g.particle_cell_[i];
        ++counts[g.cell_index(c[0], c[1], c[2]) + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) counts[c + 1] += counts[c];
    g.cell_start_ = counts;
    g.sorted_.resize(n);
    std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = g.particle_cell_[i];
        g.sorted_[fill[g.cell_index(c[0], c[1], c[2])]++] = i;
    }
    return g;
}

std::vector<std::size_t> CellGrid::neighbors(std::size_t n) const {
    std::vector<std::size_t> out;
    for_each_in_range(n, [&](std::size_t m, double) {
        if (m != n) out.push_back(m);
    });
    std::sort(out.begin(), out.end());
    return out;
}

Mat3 average_matrix(std::size_t n, std::span<const Mat3> orientations, const CellGrid& grid,
                    const Kernel& kernel) {
    Mat3 j = Mat3::Zero();
    grid.for_each_in_range(n, [&](std::size_t m, double r2) { j += kernel(r2) * orientations[m]; });
    return j / static_cast<double>(orientations.size());
}

Mat4 average_qtensor(std::size_t n, std::span<const UnitQuaternion> orientations, const CellGrid& grid,
                     const Kernel& kernel) {
    Mat4 q = Mat4::Zero();
    double mass = 0.0;
    grid.for_each_in_range(n, [&](std::size_t m, double r2) {
        const double k = kernel(r2);
        const Vec4 v = orientations[m].vec();
        q.noalias() += k * (v * v.transpose());
        mass += k;
    });
    q.diagonal().array() -= 0.25 * mass;
    return q / static_cast<double>(orientations.size());
}

Mat3 target_rotation(std::size_t n, std::span<const Mat3> orientations, const CellGrid& grid,
                     const Kernel& kernel, const DegeneracyTolerance& tol) {
    return polar_rotation(average_matrix(n, orientations, grid, kernel), tol);
}

UnitQuaternion target_quaternion(std::size_t n, std::span<const UnitQuaternion> orientations,
                                 const CellGrid& grid, const Kernel& kernel, const DegeneracyTolerance& tol) {
    return max_eigvec(average_qtensor(n, orientations, grid, kernel), tol);
}

}  // namespace sohb
