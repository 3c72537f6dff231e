#include "sohb/sohb.h"

#include <cstring>
#include <functional>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "sohb/config.hpp"
#include "sohb/errors.hpp"
#include "sohb/estimators.hpp"
#include "sohb/gci.hpp"
#include "sohb/io.hpp"
#include "sohb/rotations.hpp"
#include "sohb/runner.hpp"
#include "sohb/sampling.hpp"
#include "sohb/validation.hpp"

struct sohb_config {
    sohb::RunConfig config;
};

struct sohb_sim {
    sohb::RunConfig config;
    sohb::ParticleState state;
    sohb::RunStats stats;
};

namespace {

thread_local std::string last_error;

int fail(int code, const std::string& what) {
    last_error = what;
    return code;
}

template <class F>
int guarded(F&& body) noexcept {
    try {
        body();
        return SOHB_OK;
    } catch (const sohb::Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SOHB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SOHB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SOHB_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) throw sohb::InvalidArgument(std::string(what) + " must not be NULL");
}

void copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (buf && cap > text.size()) {
        std::memcpy(buf, text.data(), text.size());
        buf[text.size()] = '\0';
    } else if (buf || !needed) {
        throw sohb::InvalidArgument("output buffer too small");
    }
}

sohb::Mat3 mat3(const double* m) {
    sohb::Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = m[3 * i + j];
    return a;
}

void store(const sohb::Mat3& a, double* out) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[3 * i + j] = a(i, j);
}

sohb::Model model_of(int m) {
    if (m == SOHB_MODEL_GRADUAL) return sohb::Model::Gradual;
    if (m == SOHB_MODEL_JUMP) return sohb::Model::Jump;
    throw sohb::InvalidArgument("unknown model " + std::to_string(m));
}

std::optional<std::uint64_t> seed_opt(int has_seed, std::uint64_t seed) {
    return has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt;
}

void reresolve(sohb_config* c, const std::function<void(nlohmann::json&)>& edit) {
    nlohmann::json doc = c->config.resolved;
    edit(doc);
    c->config = sohb::config_from_json(std::move(doc));
}

}  // namespace

extern "C" {

const char* sohb_version(void) { return sohb::tool_version(); }

const char* sohb_last_error(void) { return last_error.c_str(); }

const char* sohb_status_name(int status) { return sohb::error_code_name(static_cast<sohb::ErrorCode>(status)); }

int sohb_config_load(const char* path, int has_seed, uint64_t seed, sohb_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sohb_config{sohb::load_config(path, seed_opt(has_seed, seed))};
    });
}

int sohb_config_parse(const char* json_text, int has_seed, uint64_t seed, sohb_config** out) {
    return guarded([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = new sohb_config{sohb::parse_config(json_text, seed_opt(has_seed, seed))};
    });
}

void sohb_config_free(sohb_config* config) { delete config; }

int sohb_config_set_mode(sohb_config* config, const char* mode) {
    return guarded([&] {
        require(config, "config");
        require(mode, "mode");
        reresolve(config, [&](nlohmann::json& doc) { doc["mode"] = mode; });
    });
}

int sohb_config_set_output(sohb_config* config, const char* dir, const char* prefix) {
    return guarded([&] {
        require(config, "config");
        reresolve(config, [&](nlohmann::json& doc) {
            if (dir) doc["output"]["dir"] = dir;
            if (prefix) doc["output"]["prefix"] = prefix;
        });
    });
}

int sohb_config_json(const sohb_config* config, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(config, "config");
        copy_out(config->config.resolved.dump(2), buf, cap, needed);
    });
}

int sohb_run(const sohb_config* config, sohb_output_callback on_output, void* user, int* passed) {
    return guarded([&] {
        require(config, "config");
        const sohb::RunResult r = sohb::run(config->config);
        if (on_output)
            for (const auto& path : r.outputs) on_output(path.c_str(), user);
        if (passed) *passed = r.passed ? 1 : 0;
    });
}

int sohb_sim_create(const sohb_config* config, sohb_sim** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto sim = std::make_unique<sohb_sim>();
        sim->config = config->config;
        sim->state = sohb::make_initial_state(sim->config.sim, sim->config.init);
        *out = sim.release();
    });
}

void sohb_sim_free(sohb_sim* sim) { delete sim; }

int sohb_sim_advance(sohb_sim* sim, uint64_t steps) {
    return guarded([&] {
        require(sim, "sim");
        const auto& p = sim->config.sim;
        if (p.model == sohb::Model::Gradual) {
            for (uint64_t k = 0; k < steps; ++k) sohb::step_gradual(sim->state, p, sim->stats);
        } else {
            sohb::run_jump(sim->state, p, sim->state.t + static_cast<double>(steps) * p.dt, sim->stats);
        }
    });
}

int sohb_sim_size(const sohb_sim* sim, size_t* n) {
    return guarded([&] {
        require(sim, "sim");
        require(n, "n");
        *n = sim->state.size();
    });
}

int sohb_sim_time(const sohb_sim* sim, double* t) {
    return guarded([&] {
        require(sim, "sim");
        require(t, "t");
        *t = sim->state.t;
    });
}

int sohb_sim_positions(const sohb_sim* sim, double* out) {
    return guarded([&] {
        require(sim, "sim");
        require(out, "out");
        for (std::size_t n = 0; n < sim->state.size(); ++n)
            for (int k = 0; k < 3; ++k) out[3 * n + k] = sim->state.positions[n][k];
    });
}

int sohb_sim_rotations(const sohb_sim* sim, double* out) {
    return guarded([&] {
        require(sim, "sim");
        require(out, "out");
        for (std::size_t n = 0; n < sim->state.size(); ++n) store(sim->state.rotation(n), out + 9 * n);
    });
}

int sohb_sim_order_parameter(const sohb_sim* sim, double* value) {
    return guarded([&] {
        require(sim, "sim");
        require(value, "value");
        *value = sohb::order_parameter(sim->state).value;
    });
}

int sohb_sim_stats(const sohb_sim* sim, uint64_t* steps, uint64_t* events, uint64_t* degenerate_targets) {
    return guarded([&] {
        require(sim, "sim");
        if (steps) *steps = sim->stats.steps;
        if (events) *events = sim->stats.events;
        if (degenerate_targets) *degenerate_targets = sim->stats.degenerate_targets;
    });
}

int sohb_c1(double D, double* out) {
    return guarded([&] {
        require(out, "out");
        if (!(D > 0.0)) throw sohb::InvalidArgument("D must be positive");
        *out = sohb::c1(D);
    });
}

int sohb_gci_constants(double D, int model, sohb_constants* out) {
    return guarded([&] {
        require(out, "out");
        if (!(D > 0.0)) throw sohb::InvalidArgument("D must be positive");
        const sohb::GciConstants k = sohb::compute_constants(D, model_of(model));
        *out = {k.D, model, k.c1, k.c2, k.c2_prime, k.c3, k.c4};
    });
}

const char* sohb_constants_csv_header(void) {
    static const std::string header = sohb::constants_csv_header();
    return header.c_str();
}

int sohb_constants_csv_row(const sohb_constants* k, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(k, "k");
        sohb::GciConstants g;
        g.D = k->D;
        g.model = model_of(k->model);
        g.c1 = k->c1;
        g.c2 = k->c2;
        g.c2_prime = k->c2p;
        g.c3 = k->c3;
        g.c4 = k->c4;
        copy_out(sohb::constants_csv_row(g), buf, cap, needed);
    });
}

int sohb_format_double(double x, char* buf, size_t cap, size_t* needed) {
    return guarded([&] { copy_out(sohb::format_double(x), buf, cap, needed); });
}

int sohb_quat_to_rot(const double q[4], double r[9]) {
    return guarded([&] {
        require(q, "q");
        require(r, "r");
        store(sohb::quat_to_rot(sohb::UnitQuaternion::normalized(sohb::Vec4(q[0], q[1], q[2], q[3]))), r);
    });
}

int sohb_polar_rotation(const double m[9], double r[9]) {
    return guarded([&] {
        require(m, "m");
        require(r, "r");
        store(sohb::polar_rotation(mat3(m)), r);
    });
}

int sohb_max_eigvec(const double q[16], double out[4]) {
    return guarded([&] {
        require(q, "q");
        require(out, "out");
        sohb::Mat4 m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m(i, j) = q[4 * i + j];
        const sohb::UnitQuaternion e = sohb::max_eigvec(m);
        out[0] = e.w;
        out[1] = e.x;
        out[2] = e.y;
        out[3] = e.z;
    });
}

int sohb_criterion_count(void) { return sohb::criterion_count; }

const char* sohb_criterion_name(int id) {
    try {
        return sohb::criterion_name(id);
    } catch (const std::exception& e) {
        fail(SOHB_ERR_INVALID_ARGUMENT, e.what());
        return nullptr;
    }
}

int sohb_validate(const int* ids, size_t n_ids, uint64_t seed, sohb_criterion_callback cb, void* user,
                  int* all_passed) {
    return guarded([&] {
        if (n_ids > 0) require(ids, "ids");
        std::vector<int> only(ids, ids + n_ids);
        sohb::ValidationOptions opt;
        opt.seed = seed;
        bool ok = true;
        sohb::run_validation(only, opt, [&](const sohb::CriterionResult& r) {
            ok = ok && r.passed;
            if (cb) cb(r.id, r.name.c_str(), r.passed ? 1 : 0, r.seconds, r.detail.c_str(), user);
        });
        if (all_passed) *all_passed = ok ? 1 : 0;
    });
}

}  // extern "C"
