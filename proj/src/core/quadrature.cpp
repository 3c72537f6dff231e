#include "sohb/quadrature.hpp"

#include <algorithm>
#include <numbers>

#include "sohb/errors.hpp"

namespace sohb {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int max_depth;
};

double simpson_recurse(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.f(lm), frm = st.f(rm);
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= st.max_depth || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const AdaptiveSimpsonOptions& opt) {
    if (a == b) return 0.0;
    // Seed with a coarse composite pass so narrow peaks are not missed by the
    // first 3-point estimate.
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    std::vector<double> xs(2 * kPanels + 1), fs(2 * kPanels + 1);
    for (int i = 0; i <= 2 * kPanels; ++i) {
        xs[i] = a + 0.5 * h * i;
        fs[i] = f(xs[i]);
    }
    double coarse = 0.0;
    for (int p = 0; p < kPanels; ++p) coarse += h / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    const double tol = std::max(opt.rel_tol * std::abs(coarse), opt.abs_floor);
    SimpsonState st{f, opt.max_depth};
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double whole = h / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
        total += simpson_recurse(st, xs[2 * p], xs[2 * p + 2], fs[2 * p], fs[2 * p + 1], fs[2 * p + 2], whole,
                                 tol / kPanels, 0);
    }
    return total;
}

GaussLegendre::GaussLegendre(int n) : nodes_(n), weights_(n) {
    if (n < 1) throw InvalidArgument("GaussLegendre: n must be positive");
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node for the weight.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes_[i] = -x;
        nodes_[n - 1 - i] = x;
        weights_[i] = weights_[n - 1 - i] = w;
    }
}

}  // namespace sohb
