#include "sohb/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "sohb/errors.hpp"
#include "sohb/estimators.hpp"
#include "sohb/gci.hpp"
#include "sohb/macro.hpp"
#include "sohb/micro.hpp"
#include "sohb/parallel.hpp"
#include "sohb/sampling.hpp"

namespace sohb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string fixed6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

/// Stream base for criterion `id`; sub-uses add small offsets.
std::uint64_t stream_base(int id) { return rng_stream::misc + (static_cast<std::uint64_t>(id) << 32); }

Mat3 random_rotation(CounterRng& rng) { return quat_to_rot(sample_uniform_quat(rng)); }

Vec3 random_vector(CounterRng& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

unsigned threads_of(const ValidationOptions& opt) {
    return opt.threads == 0 ? default_thread_count() : opt.threads;
}

struct Verdict {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "FAILED " << what << "; ";
        }
    }
};

// 1. dot-product identities between the matrix and quaternion pictures.
void criterion_identities(const ValidationOptions& opt, Verdict& v) {
    const auto t0 = Clock::now();
    constexpr int pairs = 100000;
    double err_mat = 0.0, err_tensor = 0.0;
    CounterRng rng(opt.seed, stream_base(1));
    for (int i = 0; i < pairs; ++i) {
        const UnitQuaternion q = sample_uniform_quat(rng), p = sample_uniform_quat(rng);
        const double ref = q.dot(p) * q.dot(p) - 0.25;
        err_mat = std::max(err_mat, std::abs(0.5 * mat_dot(quat_to_rot(q), quat_to_rot(p)) - ref));
        err_tensor = std::max(err_tensor, std::abs(contract(qtensor(q), qtensor(p)) - ref));
    }
    const double secs = seconds_since(t0);
    v.detail << "pairs=" << pairs << " max|Phi.Phi/2 - ref|=" << sci(err_mat) << " max|Psi:Psi - ref|="
             << sci(err_tensor) << " runtime=" << sci(secs) << "s; ";
    v.require(err_mat <= 1e-12, "matrix identity within 1e-12");
    v.require(err_tensor <= 1e-12, "Q-tensor identity within 1e-12");
    v.require(secs < 1.0, "runtime < 1 s");
}

// 2. polar average vs leading eigenvector of the averaged Q-tensor.
void criterion_averaging(const ValidationOptions& opt, Verdict& v) {
    const auto t0 = Clock::now();
    constexpr int wanted = 1000;
    const double spreads[] = {0.1, 1.0, 5.0};
    std::vector<VonMises> tables;
    for (double D : spreads) tables.emplace_back(D);
    CounterRng rng(opt.seed, stream_base(2));
    int accepted = 0, skipped = 0;
    double worst = 0.0;
    for (int c = 0; accepted < wanted; ++c) {
        const VonMises& vm = tables[c % 3];
        const UnitQuaternion center = sample_uniform_quat(rng);
        const int size = 2 + c % 12;
        Mat3 j = Mat3::Zero();
        Mat4 q = Mat4::Zero();
        for (int m = 0; m < size; ++m) {
            UnitQuaternion s = vm.sample_quat(center, rng);
            if (rng.uniform() < 0.5) s = -s;
            j += quat_to_rot(s);
            q += qtensor(s);
        }
        j /= size;
        q /= size;
        const auto polar = try_polar_rotation(j);
        const auto eig = try_max_eigvec(q);
        if (!polar || !eig) {
            ++skipped;
            continue;
        }
        worst = std::max(worst, rotation_distance(quat_to_rot(*eig), *polar));
        ++accepted;
    }
    const double secs = seconds_since(t0);
    v.detail << "clusters=" << accepted << " skipped_degenerate=" << skipped << " max angle=" << sci(worst)
             << " runtime=" << sci(secs) << "s; ";
    v.require(worst <= 1e-7, "angle within 1e-7");
    v.require(secs < 5.0, "runtime < 5 s");
}

// 3. E[A e1] = c1 Lambda e1 under the von Mises law.
void criterion_consistency(const ValidationOptions& opt, Verdict& v) {
    const auto t0 = Clock::now();
    constexpr long samples = 1000000;
    CounterRng setup(opt.seed, stream_base(3));
    const Mat3 lambda = random_rotation(setup);
    int d_index = 0;
    for (double D : {0.2, 1.0, 5.0}) {
        const VonMises vm(D);
        CounterRng rng(opt.seed, stream_base(3) + 1 + d_index++);
        Vec3 sum = Vec3::Zero(), sum2 = Vec3::Zero();
        for (long i = 0; i < samples; ++i) {
            const Vec3 e = lambda * vm.draw(rng).rotation().col(0);
            sum += e;
            sum2 += e.cwiseProduct(e);
        }
        const Vec3 mean = sum / samples;
        const Vec3 var = (sum2 / samples - mean.cwiseProduct(mean)) * (samples / (samples - 1.0));
        const Vec3 expected = c1(D) * lambda.col(0);
        double worst_z = 0.0;
        for (int k = 0; k < 3; ++k)
            worst_z = std::max(worst_z, std::abs(mean[k] - expected[k]) / std::sqrt(var[k] / samples));
        v.detail << "D=" << D << " c1=" << sci(c1(D)) << " max|z|=" << sci(worst_z) << "; ";
        v.require(worst_z <= 4.0, "mean within 4 standard errors at D=" + sci(D));
    }
    const double secs = seconds_since(t0);
    v.detail << "runtime=" << sci(secs) << "s; ";
    v.require(secs < 30.0, "runtime < 30 s");
}

// Angle of Lambda^T A.
double relative_angle(const Mat3& lambda, const Mat3& a) { return rotation_angle(lambda.transpose() * a); }

// 4. jump process in a constant field: post-jump angles follow the exact law.
void criterion_jump_law(const ValidationOptions& opt, Verdict& v) {
    constexpr int trials = 100;
    constexpr std::size_t states = 100000;
    constexpr double burn_in = 5.0;
    const double D = 0.5;
    const VonMises vm(D);
    CounterRng setup(opt.seed, stream_base(4));
    const Mat3 field = random_rotation(setup);
    auto cdf = [&](double t) { return vm.angle_cdf(t); };

    std::vector<int> pass(trials, 0);
    std::vector<double> stats(trials, 0.0);
    parallel_for(
        trials, threads_of(opt),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t trial = b; trial < e; ++trial) {
                SingleFieldParams p;
                p.model = Model::Jump;
                p.field = field;
                p.D = D;
                p.seed = opt.seed;
                p.stream = stream_base(4) + 1 + trial;
                p.t_end = burn_in + states + 10.0 * std::sqrt(static_cast<double>(states));
                const SingleTrajectory traj = run_single_in_field(p, Mat3::Identity(), &vm);
                std::vector<double> angles;
                angles.reserve(states);
                for (std::size_t i = 0; i < traj.times.size() && angles.size() < states; ++i)
                    if (traj.times[i] > burn_in) angles.push_back(relative_angle(field, traj.orientations[i]));
                if (angles.size() < states) throw Error(ErrorCode::Internal, "jump trajectory too short");
                const KsResult ks = ks_one_sample(std::move(angles), cdf);
                stats[trial] = ks.statistic;
                pass[trial] = ks.p_value >= 0.01;
            }
        },
        1);
    const int passed = std::accumulate(pass.begin(), pass.end(), 0);
    v.detail << "D=" << D << " trials=" << trials << " states/trial=" << states << " non-rejections=" << passed
             << " mean KS=" << sci(std::accumulate(stats.begin(), stats.end(), 0.0) / trials) << "; ";
    v.require(passed >= 97, ">= 97/100 non-rejections at alpha 0.01");
}

// 5. gradual dynamics in a constant field, three time steps driven by one
// Brownian path per replica (coarse increments are sums of fine ones).
void criterion_gradual_law(const ValidationOptions& opt, Verdict& v) {
    constexpr int trials = 100;
    constexpr std::size_t replicas = 100000;
    constexpr int levels = 3;
    const double dts[levels] = {4e-3, 2e-3, 1e-3};
    const double D = 2.0;
    const double horizon = 0.5;
    const long fine_steps = std::lround(horizon / dts[levels - 1]);
    const VonMises vm(D);
    CounterRng setup(opt.seed, stream_base(5));
    const UnitQuaternion field = sample_uniform_quat(setup);
    auto cdf = [&](double t) { return vm.angle_cdf(t); };

    std::vector<std::vector<double>> pooled(levels);
    for (auto& p : pooled) p.resize(static_cast<std::size_t>(trials) * replicas);
    std::vector<std::array<double, levels>> trial_stat(trials);
    std::vector<int> finest_pass(trials, 0);

    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t offset = static_cast<std::size_t>(trial) * replicas;
        parallel_for(replicas, threads_of(opt), [&](std::size_t b, std::size_t e) {
            const double s = std::sqrt(dts[levels - 1]);
            for (std::size_t r = b; r < e; ++r) {
                const std::uint64_t stream = stream_base(5) + 1 + offset + r;
                CounterRng start(opt.seed, stream, 0);
                const UnitQuaternion q0 = vm.sample_quat(field, start);
                UnitQuaternion q[levels] = {q0, q0, q0};
                Vec4 acc[levels - 1] = {Vec4::Zero(), Vec4::Zero()};
                CounterRng rng(opt.seed, stream, 1);
                for (long j = 1; j <= fine_steps; ++j) {
                    const Vec4 dB(s * rng.normal(), s * rng.normal(), s * rng.normal(), s * rng.normal());
                    q[2] = gradual_quat_update(q[2], field, D, dts[2], dB);
                    acc[0] += dB;
                    acc[1] += dB;
                    if (j % 2 == 0) {
                        q[1] = gradual_quat_update(q[1], field, D, dts[1], acc[1]);
                        acc[1].setZero();
                    }
                    if (j % 4 == 0) {
                        q[0] = gradual_quat_update(q[0], field, D, dts[0], acc[0]);
                        acc[0].setZero();
                    }
                }
                for (int l = 0; l < levels; ++l)
                    pooled[l][offset + r] = 2.0 * std::acos(std::min(1.0, std::abs(q[l].dot(field))));
            }
        });
        for (int l = 0; l < levels; ++l) {
            std::vector<double> chunk(pooled[l].begin() + offset, pooled[l].begin() + offset + replicas);
            const KsResult ks = ks_one_sample(std::move(chunk), cdf);
            trial_stat[trial][l] = ks.statistic;
            if (l == levels - 1) finest_pass[trial] = ks.p_value >= 0.01;
        }
    }

    double pooled_ks[levels];
    for (int l = 0; l < levels; ++l) pooled_ks[l] = ks_one_sample(std::move(pooled[l]), cdf).statistic;
    const int passed = std::accumulate(finest_pass.begin(), finest_pass.end(), 0);
    v.detail << "D=" << D << " T=" << horizon << " replicas/trial=" << replicas << " pooled KS(dt=4e-3,2e-3,1e-3)="
             << fixed6(pooled_ks[0]) << "," << fixed6(pooled_ks[1]) << "," << fixed6(pooled_ks[2])
             << " finest non-rejections=" << passed << "; ";
    v.require(pooled_ks[0] > pooled_ks[1] && pooled_ks[1] > pooled_ks[2], "KS decreasing with dt");
    v.require(passed >= 95, ">= 95/100 non-rejections at the finest dt");
}

// 6. matrix vs quaternion gradual populations: same positions, independent noise.
void criterion_equivalence_in_law(const ValidationOptions& opt, Verdict& v) {
    constexpr int trials = 100;
    SimParams base;
    base.N = 512;
    base.D = 0.3;
    base.box.lengths = Vec3(8.0, 8.0, 8.0);
    base.radius = 1.0;
    base.dt = 0.01;
    base.threads = 1;
    const double horizon = 2.0;
    const auto steps = std::lround(horizon / base.dt);

    std::vector<int> pass(trials, 0);
    std::vector<double> stat(trials, 0.0);
    std::vector<std::uint64_t> degenerate(trials, 0);
    parallel_for(
        trials, threads_of(opt),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t trial = b; trial < e; ++trial) {
                InitSpec init;
                init.orientation = InitOrientation::Aligned;
                init.position_seed = opt.seed + trial;
                std::vector<double> samples[2];
                for (int rep = 0; rep < 2; ++rep) {
                    SimParams p = base;
                    p.representation = rep == 0 ? Representation::Matrix : Representation::Quaternion;
                    p.seed = opt.seed + stream_base(6) + 2 * trial + rep;
                    ParticleState s = make_initial_state(p, init);
                    RunStats st;
                    for (long k = 0; k < steps; ++k) step_gradual(s, p, st);
                    degenerate[trial] += st.degenerate_targets;
                    if (rep == 0) {
                        const auto& mats = std::get<MatrixOrientations>(s.orientations);
                        const Mat3 global = order_parameter(mats).mean_orientation;
                        for (const auto& a : mats) samples[0].push_back(mat_dot(global, a));
                    } else {
                        const auto& quats = std::get<QuaternionOrientations>(s.orientations);
                        Mat4 qt = Mat4::Zero();
                        for (const auto& q : quats) qt += qtensor(q);
                        const UnitQuaternion global = max_eigvec(qt / static_cast<double>(quats.size()));
                        for (const auto& q : quats) samples[1].push_back(2.0 * q.dot(global) * q.dot(global) - 0.5);
                    }
                }
                const KsResult ks = ks_two_sample(std::move(samples[0]), std::move(samples[1]));
                stat[trial] = ks.statistic;
                pass[trial] = ks.p_value >= 0.01;
            }
        },
        1);
    const int passed = std::accumulate(pass.begin(), pass.end(), 0);
    v.detail << "N=" << base.N << " D=" << base.D << " T=" << horizon << " dt=" << base.dt
             << " non-rejections=" << passed << " mean KS=" << sci(std::accumulate(stat.begin(), stat.end(), 0.0) / trials)
             << " degenerate targets=" << std::accumulate(degenerate.begin(), degenerate.end(), std::uint64_t{0})
             << "; ";
    v.require(passed >= 95, ">= 95/100 non-rejections at alpha 0.01");
}

// 7. h profile, constants and their quadrature cross-check.
void criterion_gci(const ValidationOptions&, Verdict& v) {
    double worst_residual = 0.0, worst_odd = 0.0, worst_sign = -1.0, worst_identity = 0.0, worst_dual = 0.0;
    bool c3_exact = true;
    for (double D : {0.2, 1.0, 5.0}) {
        const GciProfile g = GciProfile::gradual(D);
        worst_residual = std::max(worst_residual, g.residual());
        for (int i = 0; i <= 2000; ++i) {
            const double r = (1.0 - 1e-4) * i / 2000.0;
            worst_odd = std::max(worst_odd, std::abs(g.hbar(r) + g.hbar(-r)));
            worst_sign = std::max(worst_sign, g.hbar(r));
        }
        for (Model m : {Model::Gradual, Model::Jump}) {
            const GciProfile p = m == Model::Gradual ? g : GciProfile::jump(D);
            const GciConstants a = compute_constants(p, GciQuadrature::AdaptiveSimpson);
            const GciConstants b = compute_constants(p, GciQuadrature::GaussLegendre512);
            c3_exact = c3_exact && a.c3 == D / 2.0 && b.c3 == D / 2.0;
            const double pa[] = {a.c1, a.c2, a.c2_prime, a.c3, a.c4};
            const double pb[] = {b.c1, b.c2, b.c2_prime, b.c3, b.c4};
            for (int k = 0; k < 5; ++k)
                worst_dual = std::max(worst_dual, std::abs(pa[k] - pb[k]) / std::max(1.0, std::abs(pa[k])));
            if (m == Model::Jump) worst_identity = std::max(worst_identity, std::abs(a.c2 - a.c2_prime - a.c4));
        }
    }
    v.detail << "max residual=" << sci(worst_residual) << " max|h(r)+h(-r)|=" << sci(worst_odd)
             << " max h on [0,1)=" << sci(worst_sign) << " max|c2-c2'-c4|=" << sci(worst_identity)
             << " max dual-quadrature gap=" << sci(worst_dual) << "; ";
    v.require(worst_residual <= 1e-6, "h residual <= 1e-6");
    v.require(worst_odd <= 1e-8, "h odd within 1e-8");
    v.require(worst_sign <= 1e-10, "h <= 1e-10 on [0,1)");
    v.require(c3_exact, "c3 = D/2 exactly");
    v.require(worst_identity <= 1e-10, "jump c2 - c2' = c4 within 1e-10");
    v.require(worst_dual <= 1e-8, "dual quadrature agreement within 1e-8");
}

// 8. adjoint equation of the jump-model collision invariants.
void criterion_adjoint(const ValidationOptions& opt, Verdict& v) {
    CounterRng rng(opt.seed, stream_base(8));
    const double Ds[] = {0.2, 1.0, 5.0};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Mat3 lambda0 = random_rotation(rng);
        const Vec3 p = random_vector(rng);
        worst = std::max(worst, verify_adjoint_jump(lambda0, p, Ds[i % 3]));
    }
    const AdjointSpanFit fit = adjoint_span_fit(random_rotation(rng), random_vector(rng), 1.0);
    v.detail << "pairs=100 max|integral|=" << sci(worst) << " span fit residual=" << sci(fit.fit_residual)
             << " slope=" << sci(fit.slope) << "; ";
    v.require(worst <= 1e-8, "adjoint residual <= 1e-8");
    v.require(fit.fit_residual <= 1e-6, "discrete solution in span{1, P.Lambda0^T A}");
}

// Smooth one-parameter field along x1: q = e(a sin phi, n1) e(b cos phi, n2) qc.
struct WaveFamily {
    double a = 0.8, b = 0.6;
    Vec3 n1 = Vec3(1.0, 2.0, 2.0).normalized();
    Vec3 n2 = Vec3(-2.0, 1.0, 0.5).normalized();
    UnitQuaternion qc = UnitQuaternion::from_angle_axis(1.1, Vec3(0.0, 0.6, 0.8));

    UnitQuaternion q(double phi) const {
        return UnitQuaternion::from_angle_axis(a * std::sin(phi), n1) *
               UnitQuaternion::from_angle_axis(b * std::cos(phi), n2) * qc;
    }
    /// Axial vector of (dΛ/dx) Λᵀ for phi = 2π x (unit period).
    Vec3 omega(double phi) const {
        const double k = 2.0 * std::numbers::pi;
        return a * k * std::cos(phi) * n1 - b * k * std::sin(phi) * (angle_axis_matrix(a * std::sin(phi), n1) * n2);
    }
};

MacroField family_field(const WaveFamily& w, int n) {
    MacroField f;
    f.grid.n = {n, 1, 1};
    f.grid.h = Vec3(1.0 / n, 1.0, 1.0);
    f.rho.assign(n, 1.0);
    QuaternionOrientations qs(n);
    for (int i = 0; i < n; ++i) qs[i] = w.q(2.0 * std::numbers::pi * i / n);
    f.orientation = std::move(qs);
    return f;
}

// 9. operator convergence and tangency of the assembled residual.
void criterion_macro_operators(const ValidationOptions& opt, Verdict& v) {
    const WaveFamily w;
    const int sizes[] = {32, 64, 128};
    double err[4][3] = {};
    for (int s = 0; s < 3; ++s) {
        const MacroField qf = family_field(w, sizes[s]);
        const MacroField mf = to_matrix_field(qf);
        const OrientationDerivatives od = orientation_derivatives(mf);
        const RelativeDerivatives rd = rel_derivative(qf);
        for (int i = 0; i < sizes[s]; ++i) {
            const Vec3 om = w.omega(2.0 * std::numbers::pi * i / sizes[s]);
            Mat3 dx = Mat3::Zero();
            dx.col(0) = om;
            err[0][s] = std::max(err[0][s], (od.Dx[i] - dx).norm());
            err[1][s] = std::max(err[1][s], std::abs(od.delta[i] - om[0]));
            err[2][s] = std::max(err[2][s], (od.r[i] - Vec3::UnitX().cross(om)).norm());
            err[3][s] = std::max(err[3][s], (rd.rel[i][0] - 0.5 * om).norm());
        }
    }
    const char* names[] = {"Dx", "delta", "r", "rel"};
    for (int o = 0; o < 4; ++o) {
        const double r1 = err[o][0] / err[o][1], r2 = err[o][1] / err[o][2];
        v.detail << names[o] << " ratios=" << sci(r1) << "," << sci(r2) << " ";
        v.require(r1 >= 3.5 && r2 >= 3.5, std::string(names[o]) + " error ratio >= 3.5");
    }

    // Tangency on 3D fields varying along every axis.
    CounterRng rng(opt.seed, stream_base(9));
    double worst_tangency = 0.0, worst_orth = 0.0;
    for (const GciConstants& k : {compute_constants(1.0, Model::Jump), compute_constants(0.5, Model::Gradual)}) {
        MacroGrid g;
        g.n = {12, 10, 8};
        g.h = Vec3(1.0 / 12, 1.0 / 10, 1.0 / 8);
        MacroField qf = wave_field(g, 0.5, 0.4, Representation::Quaternion);
        MacroTimeDerivatives td;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const UnitQuaternion q = std::get<QuaternionOrientations>(qf.orientation)[i];
            const Vec3 u = random_vector(rng);
            td.rho.push_back(rng.normal());
            td.lambda.push_back(hat(u) * quat_to_rot(q));
            td.q.push_back(quat_mul(Vec4(0.0, 0.5 * u[0], 0.5 * u[1], 0.5 * u[2]), q.vec()));
        }
        worst_tangency = std::max(worst_tangency, residual_matrix(to_matrix_field(qf), k, td).tangency_violation);
        worst_orth = std::max(worst_orth, residual_quaternion(qf, k, td).orthogonality_violation);
    }
    v.detail << "tangency violation=" << sci(worst_tangency) << " quaternion orthogonality=" << sci(worst_orth)
             << "; ";
    v.require(worst_tangency <= 1e-8, "tangency violation <= 1e-8");
    v.require(worst_orth <= 1e-8, "quaternion residual orthogonal to q within 1e-8");
}

// 10. matrix and quaternion macroscopic runs from the same initial field.
void criterion_macro_coevolution(const ValidationOptions&, Verdict& v) {
    const GciConstants k = compute_constants(1.0, Model::Jump);
    const MacroStepOptions step_opt{0.5, 0.2};
    const int sizes[] = {64, 128};
    double C[2] = {}, err[2] = {}, worst_mass = 0.0;
    for (int level = 0; level < 2; ++level) {
        MacroGrid g;
        g.n = {sizes[level], 1, 1};
        g.h = Vec3(1.0 / sizes[level], 1.0, 1.0);
        MacroField qf = wave_field(g, 0.3, 0.3, Representation::Quaternion);
        MacroField mf = to_matrix_field(qf);
        const double dt = max_stable_dt(g, k, step_opt.sigma);
        const double m0q = total_mass(qf), m0m = total_mass(mf);
        const int steps = 200 << level;
        for (int s = 0; s < steps; ++s) {
            step_macro(qf, dt, k, step_opt);
            step_macro(mf, dt, k, step_opt);
        }
        for (std::size_t i = 0; i < g.size(); ++i) err[level] = std::max(err[level], (qf.rotation(i) - mf.rotation(i)).norm());
        worst_mass = std::max({worst_mass, std::abs(total_mass(qf) - m0q) / m0q, std::abs(total_mass(mf) - m0m) / m0m});
        C[level] = err[level] / (dt + g.h[0] * g.h[0]);
        v.detail << "n=" << sizes[level] << " steps=" << steps << " dt=" << sci(dt) << " max|Phi(q)-Lambda|="
                 << sci(err[level]) << " C=" << sci(C[level]) << "; ";
    }
    const double ratio = C[1] / C[0];
    v.detail << "C ratio=" << sci(ratio) << " max relative mass drift=" << sci(worst_mass) << "; ";
    v.require(ratio >= 0.25 && ratio <= 4.0, "C stable between levels");
    v.require(worst_mass <= 1e-12, "mass conserved to 1e-12");
}

double step_time(std::size_t N, double length_x, double side, std::uint64_t seed) {
    SimParams p;
    p.N = N;
    p.D = 0.5;
    p.box.lengths = Vec3(length_x, side, side);
    p.radius = 1.0;
    p.dt = 0.01;
    p.threads = 1;
    p.seed = seed;
    InitSpec init;
    init.orientation = InitOrientation::VonMises;
    init.spread_D = 0.5;
    init.position_seed = seed;
    init.orientation_seed = seed;
    ParticleState s = make_initial_state(p, init);
    RunStats st;
    step_gradual(s, p, st);  // warm-up
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
        const auto t0 = Clock::now();
        for (int k = 0; k < 3; ++k) step_gradual(s, p, st);
        best = std::min(best, seconds_since(t0) / 3.0);
    }
    return best;
}

// 11. neighbour search exactness and step-time scaling at fixed density.
void criterion_performance(const ValidationOptions& opt, Verdict& v) {
    CounterRng rng(opt.seed, stream_base(11));
    const Box box{Vec3(5.0, 6.0, 7.0)};
    std::vector<Vec3> pos(200);
    for (auto& x : pos) x = Vec3(rng.uniform() * 5.0, rng.uniform() * 6.0, rng.uniform() * 7.0);
    const CellGrid grid = CellGrid::build(pos, box, 1.0);
    std::size_t mismatches = 0, pairs = 0;
    for (std::size_t n = 0; n < pos.size(); ++n) {
        std::vector<std::size_t> brute;
        for (std::size_t m = 0; m < pos.size(); ++m)
            if (m != n && box.min_image(pos[m] - pos[n]).norm() < 1.0) brute.push_back(m);
        pairs += brute.size();
        if (grid.neighbors(n) != brute) ++mismatches;
    }
    const double side = std::cbrt(1e4);
    const double t1 = step_time(10000, side, side, opt.seed);
    const double t2 = step_time(20000, 2.0 * side, side, opt.seed);
    v.detail << "N=200 neighbour pairs=" << pairs << " mismatches=" << mismatches << " step(1e4)=" << sci(t1)
             << "s step(2e4)=" << sci(t2) << "s ratio=" << sci(t2 / t1) << "; ";
    v.require(mismatches == 0, "grid query equals brute force");
    v.require(t2 / t1 <= 2.5, "step time ratio <= 2.5");
}

using CriterionFn = void (*)(const ValidationOptions&, Verdict&);

struct Criterion {
    const char* name;
    CriterionFn fn;
};

const Criterion& criterion(int id) {
    static const Criterion table[criterion_count] = {
        {"algebraic identities", criterion_identities},
        {"averaging equivalence", criterion_averaging},
        {"consistency relation", criterion_consistency},
        {"stationary law, jump", criterion_jump_law},
        {"stationary law, gradual", criterion_gradual_law},
        {"equivalence in law", criterion_equivalence_in_law},
        {"GCI pipeline", criterion_gci},
        {"adjoint GCI check", criterion_adjoint},
        {"macro operators", criterion_macro_operators},
        {"macro co-evolution", criterion_macro_coevolution},
        {"performance scaling", criterion_performance},
    };
    if (id < 1 || id > criterion_count) throw InvalidArgument("unknown criterion " + std::to_string(id));
    return table[id - 1];
}

}  // namespace

const char* criterion_name(int id) { return criterion(id).name; }

CriterionResult run_criterion(int id, const ValidationOptions& opt) {
    const Criterion& c = criterion(id);
    CriterionResult r;
    r.id = id;
    r.name = c.name;
    const auto t0 = Clock::now();
    Verdict v;
    try {
        c.fn(opt, v);
    } catch (const std::exception& e) {
        v.passed = false;
        v.detail << "error: " << e.what();
    }
    r.seconds = seconds_since(t0);
    r.passed = v.passed;
    r.detail = v.detail.str();
    while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
    return r;
}

std::vector<CriterionResult> run_validation(const std::vector<int>& only, const ValidationOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::set<int> ids(only.begin(), only.end());
    if (ids.empty())
        for (int id = 1; id <= criterion_count; ++id) ids.insert(id);
    for (int id : ids) criterion(id);  // reject unknown ids before running anything
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, opt));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s [%2d] %s (%.1f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds);
    return std::string(head) + ": " + r.detail;
}

}  // namespace sohb
