#include "sohb/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sohb/errors.hpp"
#include "sohb/estimators.hpp"
#include "sohb/gci.hpp"
#include "sohb/io.hpp"
#include "sohb/macro.hpp"
#include "sohb/parallel.hpp"
#include "sohb/validation.hpp"

namespace sohb {

using nlohmann::json;

const char* tool_version() { return "sohb 0.1.0"; }

json make_metadata(const RunConfig& config, const std::vector<std::string>& outputs) {
    json echoed = config.resolved;
    run_config_validator().validate(echoed);
    json meta = {{"format", "sohb-metadata-1"},
                 {"tool", tool_version()},
                 {"mode", to_string(config.mode)},
                 {"config", std::move(echoed)},
                 {"outputs", outputs}};
    return meta;
}

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& c, const std::string& suffix) {
    return (fs::path(c.output_dir) / (c.output_prefix + suffix)).string();
}

std::string sidecar_path(const std::string& data_path) {
    fs::path p(data_path);
    return (p.parent_path() / (p.stem().string() + ".meta.json")).string();
}

std::ofstream open_output(const std::string& path) {
    std::error_code ec;
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void write_metadata(const std::string& data_path, json meta, RunResult& result) {
    metadata_validator().validate(meta);
    const std::string path = sidecar_path(data_path);
    write_text_file(path, meta.dump(2) + "\n");
    result.outputs.push_back(path);
    result.metadata.push_back(std::move(meta));
}

std::string replica_suffix(std::uint64_t r) { return "_r" + std::to_string(r); }

struct ReplicaOutput {
    std::vector<std::string> files;
    json meta;
};

ReplicaOutput simulate_replica(const RunConfig& c, std::uint64_t r, unsigned threads) {
    SimParams params = c.sim;
    params.seed = c.sim.seed + r;
    params.threads = threads;
    InitSpec init = c.init;
    init.position_seed += r;
    init.orientation_seed += r;

    ParticleState state = make_initial_state(params, init);
    RunStats stats;
    ReplicaOutput out;
    const std::string frames_path = out_path(c, replica_suffix(r) + ".ndjson");
    std::ofstream frames_file = open_output(frames_path);
    FrameWriter writer(frames_file);
    out.files.push_back(frames_path);

    if (params.model == Model::Gradual) {
        const auto steps = static_cast<std::uint64_t>(std::llround(c.t_end / params.dt));
        for (std::uint64_t k = 1; k <= steps; ++k) {
            step_gradual(state, params, stats);
            if (k % c.save_every == 0) writer.write(state);
        }
    } else {
        std::vector<JumpEvent> events;
        const double interval = static_cast<double>(c.save_every) * params.dt;
        const auto frames = static_cast<std::uint64_t>(std::floor(c.t_end / interval + 1e-9));
        for (std::uint64_t k = 1; k <= frames; ++k) {
            run_jump(state, params, static_cast<double>(k) * interval, stats, &events);
            writer.write(state);
        }
        run_jump(state, params, c.t_end, stats, &events);
        const std::string events_path = out_path(c, replica_suffix(r) + "_events.ndjson");
        std::ofstream events_file = open_output(events_path);
        write_events(events_file, events, params.representation);
        out.files.push_back(events_path);
    }

    out.meta = make_metadata(c, out.files);
    out.meta["replica"] = r;
    json st = {{"steps", stats.steps},
               {"events", stats.events},
               {"degenerate_targets", stats.degenerate_targets},
               {"frames", writer.frames()},
               {"final_time", state.t}};
    try {
        st["order_parameter"] = order_parameter(state).value;
    } catch (const DegenerateAverage&) {
        // an isotropic final state has no mean orientation to report
    }
    out.meta["stats"] = std::move(st);
    return out;
}

ReplicaOutput single_replica(const RunConfig& c, std::uint64_t r) {
    SingleFieldParams p;
    p.model = c.sim.model;
    p.representation = c.sim.representation;
    p.field = c.single_field;
    p.D = c.sim.D;
    p.dt = c.sim.dt;
    p.t_end = c.t_end;
    p.seed = c.sim.seed + r;
    p.stream = 0;
    p.save_every = p.model == Model::Gradual ? c.save_every : 1;

    SimParams one = c.sim;
    one.N = 1;
    InitSpec init = c.init;
    init.center = c.single_field;
    init.position_seed += r;
    init.orientation_seed += r;
    const Mat3 initial = make_initial_state(one, init).rotation(0);

    const SingleTrajectory traj = run_single_in_field(p, initial);
    ReplicaOutput out;
    const std::string path = out_path(c, replica_suffix(r) + ".ndjson");
    std::ofstream file = open_output(path);
    FrameWriter writer(file);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (p.representation == Representation::Quaternion)
            writer.write_record(traj.times[i], 0, traj.positions[i], traj.quaternions[i]);
        else
            writer.write_record(traj.times[i], 0, traj.positions[i], traj.orientations[i]);
    }
    out.files.push_back(path);
    out.meta = make_metadata(c, out.files);
    out.meta["replica"] = r;
    json st = {{"frames", writer.frames()}, {"final_time", c.t_end}};
    if (p.model == Model::Gradual)
        st["steps"] = static_cast<std::uint64_t>(std::llround(c.t_end / p.dt));
    else
        st["events"] = traj.times.size();
    out.meta["stats"] = std::move(st);
    return out;
}

template <class Fn>
void run_replicas(const RunConfig& c, RunResult& result, Fn&& fn) {
    std::vector<ReplicaOutput> outs(c.replicas);
    const unsigned threads = c.sim.threads == 0 ? default_thread_count() : c.sim.threads;
    parallel_for(
        c.replicas, threads,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r) outs[r] = fn(r, c.replicas > 1 ? 1u : threads);
        },
        1);
    for (auto& o : outs) {
        result.outputs.insert(result.outputs.end(), o.files.begin(), o.files.end());
        write_metadata(o.files.front(), std::move(o.meta), result);
    }
}

void run_constants_table(const RunConfig& c, RunResult& result, bool full) {
    std::ostringstream csv;
    json rows = json::array();
    if (full) {
        csv << constants_csv_header() << '\n';
        for (double D : c.gci_D)
            for (Model m : c.gci_models) {
                const GciConstants k = compute_constants(D, m);
                csv << constants_csv_row(k) << '\n';
                rows.push_back(constants_json(k));
            }
    } else {
        csv << "D,c1\n";
        for (double D : c.gci_D) csv << format_double(D) << ',' << format_double(c1(D)) << '\n';
    }
    const std::string path = out_path(c, full ? "_gci.csv" : "_constants.csv");
    write_text_file(path, csv.str());
    result.outputs.push_back(path);
    json meta = make_metadata(c, {path});
    if (full) meta["constants"] = std::move(rows);
    write_metadata(path, std::move(meta), result);
}

void run_macro(const RunConfig& c, RunResult& result) {
    const MacroConfig& m = c.macro;
    MacroGrid grid;
    grid.n = m.n;
    for (int a = 0; a < 3; ++a) grid.h[a] = m.length[a] / m.n[a];
    const GciConstants k = compute_constants(c.sim.D, c.sim.model);
    MacroField field = wave_field(grid, m.amplitude, m.rho_amplitude, c.sim.representation);
    const double dt = max_stable_dt(grid, k, m.sigma);
    const MacroStepOptions opt{m.nu, m.sigma};

    const std::string path = out_path(c, "_macro.csv");
    std::ofstream file = open_output(path);
    const double mass0 = total_mass(field);
    write_macro_csv(file, field, true);
    for (std::uint64_t s = 1; s <= m.steps; ++s) {
        step_macro(field, dt, k, opt);
        if (s % m.save_every == 0) write_macro_csv(file, field, false);
    }
    result.outputs.push_back(path);
    json meta = make_metadata(c, {path});
    meta["constants"] = json::array({constants_json(k)});
    meta["macro"] = {{"nu", m.nu},
                     {"h", {grid.h[0], grid.h[1], grid.h[2]}},
                     {"dt", dt},
                     {"sigma", m.sigma},
                     {"integrator", "heun"},
                     {"mass_initial", mass0},
                     {"mass_final", total_mass(field)},
                     {"artificial_viscosity", m.nu > 0.0}};
    meta["stats"] = {{"steps", m.steps}, {"final_time", field.t}};
    write_metadata(path, std::move(meta), result);
}

void run_validate(const RunConfig& c, RunResult& result) {
    ValidationOptions opt;
    opt.seed = c.sim.seed;
    opt.threads = c.sim.threads;
    json rows = json::array();
    for (const auto& r : run_validation({}, opt)) {
        result.passed = result.passed && r.passed;
        rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                        {"seconds", r.seconds}});
    }
    const std::string path = out_path(c, "_validate.json");
    write_text_file(path, json{{"passed", result.passed}, {"criteria", rows}}.dump(2) + "\n");
    result.outputs.push_back(path);
    write_metadata(path, make_metadata(c, {path}), result);
}

}  // namespace

RunResult run(const RunConfig& config) {
    RunResult result;
    switch (config.mode) {
        case RunMode::Simulate:
            run_replicas(config, result,
                         [&](std::uint64_t r, unsigned threads) { return simulate_replica(config, r, threads); });
            break;
        case RunMode::Single:
            run_replicas(config, result, [&](std::uint64_t r, unsigned) { return single_replica(config, r); });
            break;
        case RunMode::Constants: run_constants_table(config, result, false); break;
        case RunMode::Gci: run_constants_table(config, result, true); break;
        case RunMode::Macro: run_macro(config, result); break;
        case RunMode::Validate: run_validate(config, result); break;
    }
    return result;
}

}  // namespace sohb
