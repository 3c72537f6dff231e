#pragma once

namespace sohb {

template <class F>
void CellGrid::for_each_in_range(std::size_t n, F&& f) const {
    const Vec3& xn = positions_[n];
    const auto& c = particle_cell_[n];
    const double r2max = radius_ * radius_;
    for (int dz : offsets_[2]) {
        const int cz = (c[2] + dz + dims_[2]) % dims_[2];
        for (int dy : offsets_[1]) {
            const int cy = (c[1] + dy + dims_[1]) % dims_[1];
            for (int dx : offsets_[0]) {
                const int cx = (c[0] + dx + dims_[0]) % dims_[0];
                const int cell = cell_index(cx, cy, cz);
                for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
                    const std::size_t m = sorted_[k];
                    const double r2 = box_.min_image(positions_[m] - xn).squaredNorm();
                    if (r2 < r2max) f(m, r2);
                }
            }
        }
    }
}

}  // namespace sohb
