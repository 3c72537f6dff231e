#pragma once

#include <vector>

#include "sohb/rng.hpp"
#include "sohb/rotations.hpp"

namespace sohb {

/// Unnormalized density of the rotation angle of Lambda^T A when A ~ M_Lambda:
/// exp((1/2 + cos theta) / D) * sin^2(theta / 2). Overflows for D below ~1e-3;
/// use angle_density_shifted there.
double angle_density(double theta, double D);

/// angle_density scaled by exp(-3 / (2D)), i.e. exp((cos theta - 1) / D) sin^2(theta/2).
/// Finite for every D > 0 and equal to the unshifted density up to a constant.
double angle_density_shifted(double theta, double D);

/// Angle beyond which the shifted density is below e^-80 of its value scale.
double angle_support(double D);

/// Weighted average <g>_w over [0, pi] with w = exp((cos theta - 1)/D) * extra(theta),
/// by adaptive quadrature. Uses theta = sqrt(D) * phi for D < 1e-3.
template <class G, class W>
double von_mises_average(G&& g, W&& extra, double D, double rel_tol);

/// (2/3) <1/2 + cos theta> under the angle density, relative tolerance 1e-10.
double c1(double D);

/// Mean rotation angle under M_{I3}.
double mean_angle(double D);

/// One draw from M_{I3}: the rotation angle and a uniform axis. Matrix and
/// quaternion samples built from the same draw are related exactly by Phi.
struct VonMisesDraw {
    double angle = 0.0;
    Vec3 axis = Vec3::UnitX();

    Mat3 rotation() const { return angle_axis_matrix(angle, axis); }
    UnitQuaternion quaternion() const { return UnitQuaternion::from_angle_axis(angle, axis); }
};

/// Von Mises distribution on SO3 (and on unit quaternions) with
/// concentration 1/D, sampled by inverse CDF of the angle marginal.
///
/// Construction tabulates the cumulative angle law at `table_size` nodes on
/// [0, angle_support(D)]; the object is immutable afterwards and can be
/// shared between threads.
class VonMises {
public:
    explicit VonMises(double D, int table_size = 4096);

    double D() const { return D_; }

    /// Exact angle CDF (cumulative table plus in-cell Gauss-Legendre).
    double angle_cdf(double theta) const;

    double sample_angle(CounterRng& rng) const;
    /// Consumes one uniform for the angle, then three normals for the axis.
    VonMisesDraw draw(CounterRng& rng) const;

    /// center * B with B ~ M_{I3}.
    Mat3 sample_rot(const Mat3& center, CounterRng& rng) const;
    /// center * r with r ~ M_1.
    UnitQuaternion sample_quat(const UnitQuaternion& center, CounterRng& rng) const;

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& cumulative() const { return cumulative_; }

private:
    double cell_integral(std::size_t cell, double theta) const;

    double D_;
    double dtheta_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;  // normalized, cumulative_.back() == 1
    double total_ = 0.0;
};

/// Uniform axis on S^2 from a normalized Gaussian triple.
Vec3 sample_axis(CounterRng& rng);
/// Haar-uniform unit quaternion (normalized Gaussian 4-vector).
UnitQuaternion sample_uniform_quat(CounterRng& rng);

}  // namespace sohb

#include "sohb/sampling_impl.hpp"
