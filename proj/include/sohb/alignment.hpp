#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sohb/rotations.hpp"

namespace sohb {

enum class KernelShape { Indicator, SmoothBump };

/// Radially symmetric observation kernel normalized to unit mass on R^3.
class Kernel {
public:
    explicit Kernel(double radius = 1.0, KernelShape shape = KernelShape::Indicator);

    double radius() const { return radius_; }
    KernelShape shape() const { return shape_; }
    /// K evaluated at squared distance r2; zero for r2 >= R^2.
    double operator()(double r2) const;

private:
    double radius_;
    KernelShape shape_;
    double norm_;
};

/// Periodic box [0, L0) x [0, L1) x [0, L2).
struct Box {
    Vec3 lengths = Vec3::Ones();

    Vec3 wrap(const Vec3& x) const;
    /// Minimum-image displacement.
    Vec3 min_image(const Vec3& d) const;
};

/// Cell list over a frozen snapshot of positions.
///
/// Cells have edge >= R in every direction, so the 27 surrounding cells cover
/// the interaction ball. When a direction has fewer than three cells the
/// stencil is deduplicated so nothing is visited twice.
class CellGrid {
public:
    /// Throws BoxTooSmall when a box length is below 2R.
    static CellGrid build(std::span<const Vec3> positions, const Box& box, double radius);

    std::size_t size() const { return positions_.size(); }
    const Box& box() const { return box_; }
    double radius() const { return radius_; }
    const std::vector<Vec3>& positions() const { return positions_; }

    /// Calls f(m, r2) for every particle m (self included) with |X_m - X_n| < R.
    template <class F>
    void for_each_in_range(std::size_t n, F&& f) const;

    /// Indices of the other particles strictly within R of particle n, sorted.
    std::vector<std::size_t> neighbors(std::size_t n) const;

private:
    int cell_index(int cx, int cy, int cz) const { return (cz * dims_[1] + cy) * dims_[0] + cx; }
    std::array<int, 3> cell_of(const Vec3& x) const;

    Box box_;
    double radius_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    Vec3 cell_size_ = Vec3::Ones();
    std::vector<Vec3> positions_;
    std::vector<std::size_t> cell_start_;  // size ncells + 1
    std::vector<std::size_t> sorted_;      // particle ids grouped by cell
    std::vector<std::array<int, 3>> particle_cell_;
    std::array<std::vector<int>, 3> offsets_;  // deduplicated per-axis shifts
};

/// J_n = (1/N) sum_m K(X_m - X_n) A_m over the grid snapshot, self included.
Mat3 average_matrix(std::size_t n, std::span<const Mat3> orientations, const CellGrid& grid, const Kernel& kernel);
/// Q_n = (1/N) sum_m K(X_m - X_n) (q_m (x) q_m - I4/4), self included.
Mat4 average_qtensor(std::size_t n, std::span<const UnitQuaternion> orientations, const CellGrid& grid,
                     const Kernel& kernel);

/// polar_rotation(J_n); throws DegenerateAverage.
Mat3 target_rotation(std::size_t n, std::span<const Mat3> orientations, const CellGrid& grid,
                     const Kernel& kernel, const DegeneracyTolerance& tol = {});
/// max_eigvec(Q_n); throws DegenerateAverage.
UnitQuaternion target_quaternion(std::size_t n, std::span<const UnitQuaternion> orientations,
                                 const CellGrid& grid, const Kernel& kernel, const DegeneracyTolerance& tol = {});

}  // namespace sohb

#include "sohb/alignment_impl.hpp"
