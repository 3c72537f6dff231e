#include "sohb/gci.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sohb/errors.hpp"
#include "sohb/quadrature.hpp"
#include "sohb/sampling.hpp"

namespace sohb {

ChebyshevSeries::ChebyshevSeries(std::vector<double> coeffs) : a_(std::move(coeffs)) {}

std::vector<double> lobatto_nodes(int n) {
    std::vector<double> x(n + 1);
    // sin form keeps the nodes exactly antisymmetric
    for (int j = 0; j <= n; ++j) x[j] = std::sin(std::numbers::pi * (n - 2 * j) / (2.0 * n));
    return x;
}

ChebyshevSeries ChebyshevSeries::from_lobatto_values(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size()) - 1;
    if (n < 1) throw InvalidArgument("chebyshev: need at least two values");
    std::vector<double> a(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double f = (j == 0 || j == n) ? 0.5 * values[j] : values[j];
            // cos(pi j k / n) with the argument reduced mod 2n for accuracy
            s += f * std::cos(std::numbers::pi * static_cast<double>((static_cast<long>(j) * k) % (2 * n)) / n);
        }
        a[k] = 2.0 * s / n;
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    return ChebyshevSeries(std::move(a));
}

double ChebyshevSeries::operator()(double r) const {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = a_.size(); k-- > 1;) {
        const double b0 = 2.0 * r * b1 - b2 + a_[k];
        b2 = b1;
        b1 = b0;
    }
    return a_.empty() ? 0.0 : r * b1 - b2 + a_[0];
}

ChebyshevSeries ChebyshevSeries::derivative() const {
    const std::size_t n = a_.size();
    if (n <= 1) return ChebyshevSeries(std::vector<double>{0.0});
    std::vector<double> b(n + 1, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) b[k - 1] = b[k + 1] + 2.0 * static_cast<double>(k) * a_[k];
    b[0] *= 0.5;
    b.resize(n - 1);
    return ChebyshevSeries(std::move(b));
}

Eigen::MatrixXd chebyshev_diff_matrix(int n) {
    const auto x = lobatto_nodes(n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto c = [n](int j) { return ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0); };
    for (int i = 0; i <= n; ++i) {
        double row = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            // x_i - x_j = 2 sin(pi (i+j) / 2n) sin(pi (j-i) / 2n)
            const double diff = 2.0 * std::sin(std::numbers::pi * (i + j) / (2.0 * n)) *
                                std::sin(std::numbers::pi * (j - i) / (2.0 * n));
            d(i, j) = c(i) / c(j) / diff;
            row += d(i, j);
        }
        d(i, i) = -row;
    }
    return d;
}

ChebyshevSeries solve_h_collocation(double D, int n) {
    if (!(D > 0.0)) throw InvalidArgument("solve_h: D must be positive");
    if (n < 4) throw InvalidArgument("solve_h: at least 4 intervals required");
    const auto x = lobatto_nodes(n);
    const Eigen::MatrixXd d1 = chebyshev_diff_matrix(n);
    const Eigen::MatrixXd d2 = d1 * d1;
    Eigen::MatrixXd op(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    // Normalized form: (1-r^2) h'' + ((4r/D)(1-r^2) - 5r) h' - (4r^2/D + 3) h = r.
    // Regular at r = ±1 for the bounded branch, so every node is collocated.
    for (int i = 0; i <= n; ++i) {
        const double r = x[i], s = 1.0 - r * r;
        const double p = 4.0 * r * s / D - 5.0 * r;
        const double q = -(4.0 * r * r / D + 3.0);
        op.row(i) = s * d2.row(i) + p * d1.row(i);
        op(i, i) += q;
        rhs[i] = r;
    }
    const Eigen::VectorXd h = op.partialPivLu().solve(rhs);
    return ChebyshevSeries::from_lobatto_values(std::vector<double>(h.data(), h.data() + h.size()));
}

GciProfile GciProfile::jump(double D) {
    if (!(D > 0.0)) throw InvalidArgument("gci: D must be positive");
    return GciProfile(Model::Jump, D);
}

GciProfile GciProfile::gradual(double D, const HSolveOptions& opt) {
    if (!(D > 0.0)) throw InvalidArgument("gci: D must be positive");
    GciProfile p(Model::Gradual, D);
    for (int n : opt.ladder) {
        p.h_ = solve_h_collocation(D, n);
        p.dh_ = p.h_.derivative();
        p.d2h_ = p.dh_.derivative();
        const double res = p.residual(opt.check_points, opt.edge);
        p.history_.push_back({n, res});
        if (res <= opt.tolerance) return p;
    }
    throw NoConvergence("h-ODE residual " + std::to_string(p.history_.back().residual) + " above tolerance at D=" +
                        std::to_string(D));
}

GciProfile GciProfile::make(Model model, double D) {
    return model == Model::Jump ? jump(D) : gradual(D);
}

double GciProfile::hbar(double r) const { return model_ == Model::Jump ? r : h_(r); }

double GciProfile::hbar_prime(double r) const { return model_ == Model::Jump ? 1.0 : dh_(r); }

double GciProfile::hbar_over_r(double r) const {
    if (model_ == Model::Jump) return 1.0;
    if (std::abs(r) < 1e-6) return dh_(0.0) + 0.5 * d2h_(0.0) * r;
    return h_(r) / r;
}

double GciProfile::kbar(double s) const {
    if (!(s >= -0.5 && s <= 1.5)) throw DomainError("kbar: argument outside [-1/2, 3/2]");
    return hbar_over_r(0.5 * std::sqrt(2.0 * s + 1.0));
}

double GciProfile::residual_at(double r) const {
    if (model_ == Model::Jump) return 0.0;
    const double s = 1.0 - r * r;
    const double normalized = s * d2h_(r) + (4.0 * r * s / D_ - 5.0 * r) * dh_(r) -
                              (4.0 * r * r / D_ + 3.0) * h_(r) - r;
    return std::pow(s, 1.5) * std::exp(2.0 * r * r / D_) * normalized;
}

double GciProfile::residual(int points, double edge) const {
    if (model_ == Model::Jump) return 0.0;
    const double half = 1.0 - edge;
    double worst = 0.0;
    for (int j = 0; j < points; ++j) {
        const double r = half * std::cos(std::numbers::pi * (j + 0.5) / points);
        worst = std::max(worst, std::abs(residual_at(r)));
    }
    return worst;
}

double gci_weight(const GciProfile& profile, double theta) {
    const double half = 0.5 * theta;
    const double s2 = std::sin(half) * std::sin(half);
    const double c = std::cos(half);
    return std::exp((std::cos(theta) - 1.0) / profile.D()) * s2 * s2 * profile.hbar(c) * c;
}

namespace {

const GaussLegendre& gl512() {
    static const GaussLegendre rule(512);
    return rule;
}

}  // namespace

double gci_average(const GciProfile& profile, const std::function<double(double)>& g, GciQuadrature rule) {
    auto extra = [&](double th) {
        const double half = 0.5 * th;
        const double s2 = std::sin(half) * std::sin(half);
        const double c = std::cos(half);
        return s2 * s2 * profile.hbar(c) * c;
    };
    if (rule == GciQuadrature::AdaptiveSimpson) return von_mises_average(g, extra, profile.D(), 1e-12);
    const double top = angle_support(profile.D());
    const double den = gl512().integrate([&](double th) { return gci_weight(profile, th); }, 0.0, top);
    const double num = gl512().integrate([&](double th) { return g(th) * gci_weight(profile, th); }, 0.0, top);
    return num / den;
}

GciConstants compute_constants(const GciProfile& profile, GciQuadrature rule) {
    GciConstants k;
    k.D = profile.D();
    k.model = profile.model();
    if (rule == GciQuadrature::AdaptiveSimpson) {
        k.c1 = c1(k.D);
    } else {
        const double top = angle_support(k.D);
        const double den = gl512().integrate([&](double th) { return angle_density_shifted(th, k.D); }, 0.0, top);
        const double num = gl512().integrate(
            [&](double th) { return (0.5 + std::cos(th)) * angle_density_shifted(th, k.D); }, 0.0, top);
        k.c1 = (2.0 / 3.0) * num / den;
    }
    const auto avg = [&](auto g) { return gci_average(profile, g, rule); };
    k.c2 = avg([](double th) { return 2.0 + 3.0 * std::cos(th); }) / 5.0;
    k.c2_prime = avg([](double th) { return 1.0 + 4.0 * std::cos(th); }) / 5.0;
    k.c4 = avg([](double th) { return 1.0 - std::cos(th); }) / 5.0;
    k.c3 = k.D / 2.0;
    return k;
}

GciConstants compute_constants(double D, Model model) { return compute_constants(GciProfile::make(model, D)); }

namespace {

// Product rule on SO3 for the von Mises law centred at the identity: the
// rotation angle by Gauss-Legendre against the normalized angle density,
// the axis by Gauss-Legendre in cos(polar) times a uniform azimuth grid.
struct SO3Node {
    Mat3 rotation;
    double weight;
};

std::vector<SO3Node> von_mises_grid(double D, int n_angle, int n_polar, int n_azimuth) {
    const GaussLegendre ga(n_angle), gp(n_polar);
    const double top = angle_support(D);
    std::vector<double> th(n_angle), wa(n_angle);
    double total = 0.0;
    for (int i = 0; i < n_angle; ++i) {
        th[i] = 0.5 * top * (ga.nodes()[i] + 1.0);
        wa[i] = 0.5 * top * ga.weights()[i] * angle_density_shifted(th[i], D);
        total += wa[i];
    }
    std::vector<SO3Node> grid;
    grid.reserve(static_cast<std::size_t>(n_angle) * n_polar * n_azimuth);
    for (int i = 0; i < n_angle; ++i)
        for (int j = 0; j < n_polar; ++j) {
            const double z = gp.nodes()[j], rho = std::sqrt(1.0 - z * z);
            for (int k = 0; k < n_azimuth; ++k) {
                const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_azimuth;
                const Vec3 axis(rho * std::cos(phi), rho * std::sin(phi), z);
                const double w = (wa[i] / total) * (0.5 * gp.weights()[j]) / n_azimuth;
                grid.push_back({angle_axis_matrix(th[i], axis), w});
            }
        }
    return grid;
}

}  // namespace

double verify_adjoint_jump(const Mat3& lambda0, const Vec3& p, double D) {
    const Mat3 pm = hat(p);
    const Mat3 lt = lambda0.transpose();
    double sum = 0.0;
    for (const auto& node : von_mises_grid(D, 64, 16, 32)) {
        const Mat3 a = lambda0 * node.rotation;
        sum += node.weight * mat_dot(pm, lt * a);
    }
    return std::abs(sum);
}

AdjointSpanFit adjoint_span_fit(const Mat3& lambda0, const Vec3& p, double D, int n_angle, int n_polar,
                                int n_azimuth) {
    const auto grid = von_mises_grid(D, n_angle, n_polar, n_azimuth);
    const auto n = static_cast<Eigen::Index>(grid.size());
    const Mat3 pm = hat(p);
    const Mat3 lt = lambda0.transpose();
    Eigen::VectorXd w(n), g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = grid[i].weight;
        g[i] = mat_dot(pm, lt * (lambda0 * grid[i].rotation));
    }
    // (1 w^T - I) psi = g; singular along constants, so take the minimum-norm solution.
    Eigen::MatrixXd op = Eigen::VectorXd::Ones(n) * w.transpose();
    op.diagonal().array() -= 1.0;
    const Eigen::VectorXd psi = op.completeOrthogonalDecomposition().solve(g);

    Eigen::MatrixXd basis(n, 2);
    basis.col(0).setOnes();
    basis.col(1) = g;
    const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(psi);
    AdjointSpanFit fit;
    fit.constant = coef[0];
    fit.slope = coef[1];
    const double scale = std::max(psi.cwiseAbs().maxCoeff(), 1e-300);
    fit.fit_residual = (basis * coef - psi).cwiseAbs().maxCoeff() / scale;
    fit.equation_residual = (op * psi - g).cwiseAbs().maxCoeff();
    fit.nodes = grid.size();
    return fit;
}

}  // namespace sohb
