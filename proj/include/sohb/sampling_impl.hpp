#pragma once

#include <cmath>
#include <numbers>

#include "sohb/quadrature.hpp"

namespace sohb {

template <class G, class W>
double von_mises_average(G&& g, W&& extra, double D, double rel_tol) {
    const double top = angle_support(D);
    AdaptiveSimpsonOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_floor = 1e-300;
    if (D < 1e-3) {
        const double s = std::sqrt(D);
        auto w = [&](double phi) {
            const double th = s * phi;
            return std::exp((std::cos(th) - 1.0) / D) * extra(th);
        };
        const double den = adaptive_simpson(w, 0.0, top / s, opt);
        opt.abs_floor = 1e-3 * rel_tol * std::abs(den);
        const double num = adaptive_simpson([&](double phi) { return g(s * phi) * w(phi); }, 0.0, top / s, opt);
        return num / den;
    }
    auto w = [&](double th) { return std::exp((std::cos(th) - 1.0) / D) * extra(th); };
    const double den = adaptive_simpson(w, 0.0, top, opt);
    // g is O(1) in every use; floor the numerator's tolerance against den so
    // near-cancelling averages do not refine forever.
    opt.abs_floor = 1e-3 * rel_tol * std::abs(den);
    const double num = adaptive_simpson([&](double th) { return g(th) * w(th); }, 0.0, top, opt);
    return num / den;
}

}  // namespace sohb
