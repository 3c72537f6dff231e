#include "sohb/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sohb/errors.hpp"
#include "sohb/quadrature.hpp"

namespace sohb {

namespace {

double half_sin_sq(double theta) {
    const double s = std::sin(0.5 * theta);
    return s * s;
}

const GaussLegendre& cell_rule() {
    static const GaussLegendre rule(12);
    return rule;
}

}  // namespace

double angle_density(double theta, double D) {
    return std::exp((0.5 + std::cos(theta)) / D) * half_sin_sq(theta);
}

double angle_density_shifted(double theta, double D) {
    return std::exp((std::cos(theta) - 1.0) / D) * half_sin_sq(theta);
}

double angle_support(double D) {
    constexpr double kDecades = 80.0;
    if (kDecades * D >= 2.0) return std::numbers::pi;
    return std::acos(1.0 - kDecades * D);
}

double c1(double D) {
    if (!(D > 0.0)) throw DomainError("c1: D must be positive");
    return 2.0 / 3.0 *
           von_mises_average([](double th) { return 0.5 + std::cos(th); }, half_sin_sq, D, 1e-12);
}

double mean_angle(double D) {
    if (!(D > 0.0)) throw DomainError("mean_angle: D must be positive");
    return von_mises_average([](double th) { return th; }, half_sin_sq, D, 1e-12);
}

VonMises::VonMises(double D, int table_size) : D_(D) {
    if (!(D > 0.0)) throw DomainError("VonMises: D must be positive");
    if (table_size < 2) throw InvalidArgument("VonMises: table_size must be at least 2");
    const double top = angle_support(D);
    dtheta_ = top / (table_size - 1);
    nodes_.resize(table_size);
    cumulative_.resize(table_size);
    for (int i = 0; i < table_size; ++i) nodes_[i] = i * dtheta_;
    nodes_.back() = top;
    cumulative_[0] = 0.0;
    for (int i = 1; i < table_size; ++i) {
        cumulative_[i] = cumulative_[i - 1] +
                         cell_rule().integrate([&](double t) { return angle_density_shifted(t, D_); },
                                               nodes_[i - 1], nodes_[i]);
    }
    total_ = cumulative_.back();
    for (double& c : cumulative_) c /= total_;
    cumulative_.back() = 1.0;
}

double VonMises::cell_integral(std::size_t cell, double theta) const {
    return cell_rule().integrate([&](double t) { return angle_density_shifted(t, D_); }, nodes_[cell], theta) /
           total_;
}

double VonMises::angle_cdf(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= nodes_.back()) return 1.0;
    const auto cell = std::min(static_cast<std::size_t>(theta / dtheta_), nodes_.size() - 2);
    return std::min(1.0, cumulative_[cell] + cell_integral(cell, theta));
}

double VonMises::sample_angle(CounterRng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t hi = std::clamp<std::size_t>(it - cumulative_.begin(), 1, cumulative_.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = cumulative_[hi] - cumulative_[lo];
    const double frac = span > 0.0 ? (u - cumulative_[lo]) / span : 0.0;
    return nodes_[lo] + frac * (nodes_[hi] - nodes_[lo]);
}

VonMisesDraw VonMises::draw(CounterRng& rng) const {
    VonMisesDraw d;
    d.angle = sample_angle(rng);
    d.axis = sample_axis(rng);
    return d;
}

Mat3 VonMises::sample_rot(const Mat3& center, CounterRng& rng) const { return center * draw(rng).rotation(); }

UnitQuaternion VonMises::sample_quat(const UnitQuaternion& center, CounterRng& rng) const {
    return center * draw(rng).quaternion();
}

Vec3 sample_axis(CounterRng& rng) {
    for (;;) {
        Vec3 g(rng.normal(), rng.normal(), rng.normal());
        const double n = g.norm();
        if (n > 1e-300) return g / n;
    }
}

UnitQuaternion sample_uniform_quat(CounterRng& rng) {
    for (;;) {
        Vec4 g(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        const double n = g.norm();
        if (n > 1e-300) return {g[0] / n, g[1] / n, g[2] / n, g[3] / n};
    }
}

}  // namespace sohb
