#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace sohb {

struct AdaptiveSimpsonOptions {
    double rel_tol = 1e-10;
    double abs_floor = 1e-14;
    int max_depth = 50;
};

/// Adaptive Simpson with Richardson correction. Terminates per panel when the
/// local error estimate is below max(rel_tol * |coarse estimate|, abs_floor)
/// scaled to the panel.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const AdaptiveSimpsonOptions& opt = {});

/// n-point Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
class GaussLegendre {
public:
    explicit GaussLegendre(int n);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
        return half * sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace sohb
