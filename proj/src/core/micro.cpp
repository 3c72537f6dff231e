#include "sohb/micro.hpp"

#include <cmath>
#include <optional>
#include <queue>

#include "sohb/errors.hpp"
#include "sohb/parallel.hpp"

namespace sohb {

const char* to_string(Model m) { return m == Model::Gradual ? "gradual" : "jump"; }
const char* to_string(Representation r) { return r == Representation::Matrix ? "matrix" : "quaternion"; }

Mat3 ParticleState::rotation(std::size_t n) const {
    if (const auto* mats = std::get_if<MatrixOrientations>(&orientations)) return (*mats)[n];
    return quat_to_rot(std::get<QuaternionOrientations>(orientations)[n]);
}

Vec3 ParticleState::heading(std::size_t n) const {
    if (const auto* mats = std::get_if<MatrixOrientations>(&orientations)) return (*mats)[n].col(0);
    return rotate(std::get<QuaternionOrientations>(orientations)[n], Vec3::UnitX());
}

void SimParams::validate() const {
    if (N < 1) throw InvalidArgument("N must be at least 1");
    if (!(D > 0.0)) throw InvalidArgument("D must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    for (int k = 0; k < 3; ++k)
        if (!(box.lengths[k] > 0.0)) throw InvalidArgument("box lengths must be positive");
}

ParticleState make_initial_state(const SimParams& params, const InitSpec& init) {
    params.validate();
    ParticleState s;
    s.positions.resize(params.N);
    for (std::size_t n = 0; n < params.N; ++n) {
        CounterRng rng(init.position_seed, rng_stream::initial_positions + n);
        s.positions[n] = Vec3(rng.uniform() * params.box.lengths[0], rng.uniform() * params.box.lengths[1],
                              rng.uniform() * params.box.lengths[2]);
    }
    std::vector<UnitQuaternion> quats(params.N);
    const UnitQuaternion center = rot_to_quat(init.center);
    std::optional<VonMises> vm;
    if (init.orientation == InitOrientation::VonMises) vm.emplace(init.spread_D);
    for (std::size_t n = 0; n < params.N; ++n) {
        CounterRng rng(init.orientation_seed, rng_stream::initial_orientations + n);
        switch (init.orientation) {
            case InitOrientation::Aligned: quats[n] = center; break;
            case InitOrientation::Uniform: quats[n] = sample_uniform_quat(rng); break;
            case InitOrientation::VonMises: quats[n] = vm->sample_quat(center, rng); break;
        }
    }
    if (params.representation == Representation::Matrix) {
        MatrixOrientations mats(params.N);
        for (std::size_t n = 0; n < params.N; ++n) mats[n] = quat_to_rot(quats[n]);
        s.orientations = std::move(mats);
    } else {
        s.orientations = std::move(quats);
    }
    return s;
}

Mat3 gradual_matrix_update(const Mat3& a, const Mat3& target, double D, double dt, const Mat3& dB) {
    const Mat3 forcing = dt * target + (2.0 * std::sqrt(D)) * dB;
    return reorthonormalize(a + project_tangent(a, forcing));
}

Mat3 gradual_matrix_update(const Mat3& a, const Mat3& target, double D, double dt, CounterRng& rng) {
    const double s = std::sqrt(dt);
    Mat3 dB;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dB(i, j) = s * rng.normal();
    return gradual_matrix_update(a, target, D, dt, dB);
}

UnitQuaternion gradual_quat_update(const UnitQuaternion& q, const UnitQuaternion& target, double D, double dt,
                                   const Vec4& dB) {
    const Vec4 qv = q.vec();
    const Vec4 tv = target.vec();
    // (tv tv^T - I/4) qv without forming the matrix
    Vec4 v = dt * (tv.dot(qv) * tv - 0.25 * qv) + std::sqrt(0.5 * D) * dB;
    v -= qv.dot(v) * qv;
    return UnitQuaternion::normalized(qv + v);
}

UnitQuaternion gradual_quat_update(const UnitQuaternion& q, const UnitQuaternion& target, double D, double dt,
                                   CounterRng& rng) {
    const double s = std::sqrt(dt);
    Vec4 dB;
    for (int k = 0; k < 4; ++k) dB[k] = s * rng.normal();
    return gradual_quat_update(q, target, D, dt, dB);
}

namespace {

unsigned threads_for(const SimParams& p) { return p.threads == 0 ? default_thread_count() : p.threads; }

void advance_positions(ParticleState& s, const SimParams& params, double dt) {
    for (std::size_t n = 0; n < s.size(); ++n) s.positions[n] = params.box.wrap(s.positions[n] + dt * s.heading(n));
}

}  // namespace

void step_gradual_matrix(ParticleState& state, const SimParams& params, RunStats& stats) {
    auto& mats = std::get<MatrixOrientations>(state.orientations);
    const std::size_t n_part = mats.size();
    const CellGrid grid = CellGrid::build(state.positions, params.box, params.radius);
    const Kernel kernel(params.radius, params.kernel);
    MatrixOrientations next(n_part);
    std::vector<unsigned char> degenerate(n_part, 0);
    parallel_for(n_part, threads_for(params), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            auto target = try_polar_rotation(average_matrix(n, mats, grid, kernel), params.tolerance);
            if (!target) {
                degenerate[n] = 1;
                target = mats[n];
            }
            CounterRng rng(params.seed, rng_stream::orientation_noise + n, static_cast<std::uint32_t>(state.step));
            next[n] = gradual_matrix_update(mats[n], *target, params.D, params.dt, rng);
        }
    });
    for (unsigned char d : degenerate) stats.degenerate_targets += d;
    mats = std::move(next);
    advance_positions(state, params, params.dt);
    state.t += params.dt;
    ++state.step;
    ++stats.steps;
}

void step_gradual_quat(ParticleState& state, const SimParams& params, RunStats& stats) {
    auto& quats = std::get<QuaternionOrientations>(state.orientations);
    const std::size_t n_part = quats.size();
    const CellGrid grid = CellGrid::build(state.positions, params.box, params.radius);
    const Kernel kernel(params.radius, params.kernel);
    QuaternionOrientations next(n_part);
    std::vector<unsigned char> degenerate(n_part, 0);
    parallel_for(n_part, threads_for(params), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            auto target = try_max_eigvec(average_qtensor(n, quats, grid, kernel), params.tolerance);
            if (!target) {
                degenerate[n] = 1;
                target = quats[n];
            }
            CounterRng rng(params.seed, rng_stream::orientation_noise + n, static_cast<std::uint32_t>(state.step));
            next[n] = gradual_quat_update(quats[n], *target, params.D, params.dt, rng);
        }
    });
    for (unsigned char d : degenerate) stats.degenerate_targets += d;
    quats = std::move(next);
    advance_positions(state, params, params.dt);
    state.t += params.dt;
    ++state.step;
    ++stats.steps;
}

void step_gradual(ParticleState& state, const SimParams& params, RunStats& stats) {
    if (state.representation() == Representation::Matrix)
        step_gradual_matrix(state, params, stats);
    else
        step_gradual_quat(state, params, stats);
}

void init_jump_clocks(ParticleState& state, const SimParams& params) {
    const std::size_t n_part = state.size();
    state.next_jump.resize(n_part);
    state.jump_count.assign(n_part, 0);
    for (std::size_t n = 0; n < n_part; ++n) {
        CounterRng rng(params.seed, rng_stream::orientation_noise + n, 0);
        state.next_jump[n] = state.t + rng.exponential();
    }
}

void run_jump(ParticleState& state, const SimParams& params, double t_end, RunStats& stats,
              std::vector<JumpEvent>* log) {
    params.validate();
    if (state.next_jump.size() != state.size()) init_jump_clocks(state, params);
    const VonMises vm(params.D);
    const Kernel kernel(params.radius, params.kernel);

    using Entry = std::pair<double, std::size_t>;  // ties broken by particle index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::size_t n = 0; n < state.size(); ++n) queue.emplace(state.next_jump[n], n);

    while (!queue.empty() && queue.top().first <= t_end) {
        const auto [t_event, n] = queue.top();
        queue.pop();
        advance_positions(state, params, t_event - state.t);
        state.t = t_event;

        const std::uint32_t m = ++state.jump_count[n];
        CounterRng rng(params.seed, rng_stream::orientation_noise + n, m);
        const CellGrid grid = CellGrid::build(state.positions, params.box, params.radius);
        JumpEvent ev;
        ev.t = t_event;
        ev.particle = n;
        if (auto* mats = std::get_if<MatrixOrientations>(&state.orientations)) {
            auto target = try_polar_rotation(average_matrix(n, *mats, grid, kernel), params.tolerance);
            if (!target) {
                ev.degenerate = true;
                target = (*mats)[n];
            }
            (*mats)[n] = vm.sample_rot(*target, rng);
            if (log) {
                ev.orientation.resize(9);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) ev.orientation[3 * i + j] = (*mats)[n](i, j);
            }
        } else {
            auto& quats = std::get<QuaternionOrientations>(state.orientations);
            auto target = try_max_eigvec(average_qtensor(n, quats, grid, kernel), params.tolerance);
            if (!target) {
                ev.degenerate = true;
                target = quats[n];
            }
            quats[n] = vm.sample_quat(*target, rng);
            if (log) ev.orientation = {quats[n].w, quats[n].x, quats[n].y, quats[n].z};
        }
        if (ev.degenerate) ++stats.degenerate_targets;
        ++stats.events;
        state.next_jump[n] = t_event + rng.exponential();
        queue.emplace(state.next_jump[n], n);
        if (log) log->push_back(std::move(ev));
    }
    advance_positions(state, params, t_end - state.t);
    state.t = t_end;
}

namespace {

template <class OnSample>
Mat3 drive_single(const SingleFieldParams& p, const Mat3& initial, const VonMises* table, OnSample&& on_sample) {
    if (!(p.D > 0.0)) throw InvalidArgument("single: D must be positive");
    if (!(p.t_end >= 0.0)) throw InvalidArgument("single: t_end must be nonnegative");
    CounterRng rng(p.seed, rng_stream::replica + p.stream);
    Vec3 x = Vec3::Zero();
    const bool quat = p.representation == Representation::Quaternion;
    Mat3 a = initial;
    UnitQuaternion q = rot_to_quat(initial);
    const UnitQuaternion field_q = rot_to_quat(p.field);
    auto current = [&]() -> Mat3 { return quat ? quat_to_rot(q) : a; };

    if (p.model == Model::Gradual) {
        if (!(p.dt > 0.0)) throw InvalidArgument("single: dt must be positive");
        const auto steps = static_cast<std::uint64_t>(std::llround(p.t_end / p.dt));
        for (std::uint64_t k = 1; k <= steps; ++k) {
            if (quat) {
                q = gradual_quat_update(q, field_q, p.D, p.dt, rng);
                x += p.dt * rotate(q, Vec3::UnitX());
            } else {
                a = gradual_matrix_update(a, p.field, p.D, p.dt, rng);
                x += p.dt * a.col(0);
            }
            if (k % p.save_every == 0) on_sample(k * p.dt, x, current(), q);
        }
        return current();
    }

    std::optional<VonMises> own;
    if (!table || table->D() != p.D) table = &own.emplace(p.D);
    double t = 0.0;
    for (;;) {
        const double next = t + rng.exponential();
        if (next > p.t_end) {
            x += (p.t_end - t) * current().col(0);
            break;
        }
        x += (next - t) * current().col(0);
        t = next;
        const VonMisesDraw d = table->draw(rng);
        if (quat)
            q = field_q * d.quaternion();
        else
            a = p.field * d.rotation();
        on_sample(t, x, current(), q);
    }
    return current();
}

}  // namespace

SingleTrajectory run_single_in_field(const SingleFieldParams& params, const Mat3& initial, const VonMises* table) {
    SingleTrajectory traj;
    const bool quat = params.representation == Representation::Quaternion;
    drive_single(params, initial, table, [&](double t, const Vec3& x, const Mat3& a, const UnitQuaternion& q) {
        traj.times.push_back(t);
        traj.positions.push_back(x);
        traj.orientations.push_back(a);
        if (quat) traj.quaternions.push_back(q);
    });
    return traj;
}

Mat3 single_in_field_final(const SingleFieldParams& params, const Mat3& initial, const VonMises* table) {
    return drive_single(params, initial, table, [](double, const Vec3&, const Mat3&, const UnitQuaternion&) {});
}

}  // namespace sohb
