#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "sohb/config.hpp"
#include "sohb/errors.hpp"
#include "sohb/estimators.hpp"
#include "sohb/io.hpp"
#include "sohb/parallel.hpp"
#include "sohb/rng.hpp"
#include "sohb/runner.hpp"
#include "sohb/sampling.hpp"

using namespace sohb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("sohb_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

RunConfig sim_config(const TempDir& dir, const std::string& prefix, json extra = json::object()) {
    json doc = {{"N", 20},     {"D", 0.5},  {"model", "jump"}, {"representation", "matrix"},
                {"t_end", 0.5}, {"seed", 11}, {"box", {4, 4, 4}}, {"save_every", 10},
                {"output", {{"dir", dir.path.string()}, {"prefix", prefix}}}};
    doc.merge_patch(extra);
    return config_from_json(doc);
}

}  // namespace

TEST_CASE("configuration schema") {
    SUBCASE("minimal document gets defaults") {
        const RunConfig c =
            parse_config(R"({"N": 5, "D": 0.4, "model": "jump", "representation": "quaternion", "t_end": 2, "seed": 3})");
        CHECK(c.sim.N == 5);
        CHECK(c.sim.model == Model::Jump);
        CHECK(c.sim.representation == Representation::Quaternion);
        CHECK(c.sim.seed == 3);
        CHECK(c.init.position_seed == 3);
        CHECK(c.resolved.at("dt") == 0.01);
        CHECK(c.resolved.at("output").at("prefix") == "run");
        CHECK(c.resolved.at("tolerance").at("det_min") == 1e-9);
    }
    SUBCASE("negative D names the field") {
        try {
            parse_config(R"({"D": -1})");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.path() == "D");
        }
    }
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(parse_config(R"({"N": 5, "colour": "blue"})"), SchemaError);
        CHECK_THROWS_AS(parse_config(R"({"init": {"shape": 1}})"), SchemaError);
    }
    SUBCASE("nested paths") {
        try {
            parse_config(R"({"macro": {"n": [4, 0, 1]}})");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.path() == "macro.n[1]");
        }
    }
    SUBCASE("seed override and malformed text") {
        CHECK(parse_config(R"({"seed": 3})", 42).sim.seed == 42);
        CHECK_THROWS_AS(parse_config("{\"N\": "), ParseError);
        CHECK_THROWS_AS(load_config("/nonexistent/sohb.json"), IoError);
    }
    SUBCASE("published schema files match the embedded copies") {
        CHECK(json::parse(slurp(fs::path(SOHB_SCHEMA_DIR) / "run_config.schema.json")) ==
              json::parse(run_config_schema_text()));
        CHECK(json::parse(slurp(fs::path(SOHB_SCHEMA_DIR) / "metadata.schema.json")) ==
              json::parse(metadata_schema_text()));
    }
}

TEST_CASE("order parameter") {
    const Mat3 a = angle_axis_matrix(0.4, Vec3(0, 1, 0));
    const std::vector<Mat3> same(50, a);
    const OrderParameter op = order_parameter(same);
    CHECK(op.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((op.mean_orientation - a).norm() < 1e-13);

    CounterRng rng(31, 0);
    std::vector<Mat3> uniform(100000);
    for (auto& m : uniform) m = quat_to_rot(sample_uniform_quat(rng));
    CHECK(order_parameter(uniform).value < 0.02);

    const VonMises vm(0.6);
    std::vector<Mat3> concentrated(100000);
    for (auto& m : concentrated) m = vm.sample_rot(a, rng);
    // Standard error of the mean of mat_dot(Lambda, A)/1.5 over 1e5 draws is below 2e-3.
    CHECK(std::abs(order_parameter(concentrated).value - c1(0.6)) < 0.01);
}

TEST_CASE("Kolmogorov-Smirnov") {
    std::vector<double> x(200);
    CounterRng rng(41, 0);
    for (double& v : x) v = rng.uniform();
    CHECK(ks_two_sample(x, x).statistic == 0.0);
    CHECK(ks_two_sample(x, x).p_value == doctest::Approx(1.0));
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>(50, 0.5), x), TooFewSamples);
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(1e-2));

    int two_sample_rejections = 0, one_sample_rejections = 0;
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng r(42, trial);
        std::vector<double> a(10000), b(10000);
        for (double& v : a) v = r.uniform();
        for (double& v : b) v = r.uniform();
        two_sample_rejections += ks_two_sample(a, b).p_value < 0.01;
        one_sample_rejections += ks_one_sample(a, [](double u) { return u; }).p_value < 0.01;
    }
    CHECK(two_sample_rejections <= 3);
    CHECK(one_sample_rejections <= 3);

    std::vector<double> shifted(10000);
    for (double& v : shifted) v = 0.1 + 0.9 * rng.uniform();
    CHECK(ks_one_sample(shifted, [](double u) { return u; }).p_value < 1e-6);

    const EstimatorReport rep = ks_report("ks", ks_one_sample(x, [](double u) { return u; }), 0.01);
    CHECK(rep.samples == 200);
    CHECK(rep.std_error > 0.0);
}

TEST_CASE("mean and standard error") {
    const std::vector<double> v{1, 2, 3, 4};
    const MeanStd m = mean_and_error(v);
    CHECK(m.mean == 2.5);
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CounterRng rng(51, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal() * std::pow(10.0, rng.normal() * 5);
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("NDJSON frames") {
    std::ostringstream out;
    FrameWriter w(out);
    ParticleState s;
    s.positions = {Vec3(0.5, 1.25, 2.0)};
    s.orientations = QuaternionOrientations{UnitQuaternion::from_angle_axis(0.3, Vec3::UnitX())};
    w.write(s);
    s.t = 0.1;
    w.write(s);
    CHECK(w.frames() == 2);
    CHECK(count_lines(out.str()) == 2);

    std::istringstream in(out.str());
    const auto records = read_frames(in);
    REQUIRE(records.size() == 2);
    CHECK(records[1].t == 0.1);
    CHECK(records[0].id == 0);
    CHECK(records[0].kind == "quat");
    CHECK(records[0].x == s.positions[0]);
    const auto& q = std::get<QuaternionOrientations>(s.orientations)[0];
    CHECK(records[0].v == std::vector<double>{q.w, q.x, q.y, q.z});

    const json line = json::parse(out.str().substr(0, out.str().find('\n')));
    std::vector<std::string> keys;
    for (auto it = line.begin(); it != line.end(); ++it) keys.push_back(it.key());
    CHECK(line.size() == 4);
    CHECK(out.str().rfind(R"({"t":0,"id":0,"x":[0.5,1.25,2],"orient":{"kind":"quat","v":[)", 0) == 0);
}

TEST_CASE("simulate runs") {
    TempDir dir;
    SUBCASE("outputs, metadata and determinism") {
        const RunConfig c = sim_config(dir, "a");
        const RunResult r1 = run(c);
        const std::string frames1 = slurp(dir.path / "a_r0.ndjson");
        const std::string events1 = slurp(dir.path / "a_r0_events.ndjson");
        CHECK(count_lines(frames1) == 5 * 20);
        CHECK(count_lines(events1) > 0);
        REQUIRE(r1.metadata.size() == 1);
        json meta = json::parse(slurp(dir.path / "a_r0.meta.json"));
        CHECK_NOTHROW(metadata_validator().validate(meta));
        CHECK(meta.at("config") == c.resolved);
        CHECK(meta.at("stats").at("frames") == 5);
        RunConfig again = config_from_json(meta.at("config"));
        CHECK(again.resolved == c.resolved);

        run(c);
        CHECK(slurp(dir.path / "a_r0.ndjson") == frames1);
        CHECK(slurp(dir.path / "a_r0_events.ndjson") == events1);
    }
    SUBCASE("matrix and quaternion files are related by the quaternion map") {
        const json init = {{"D", 0.2}, {"init", {{"orientation", "von_mises"}, {"spread_D", 0.2}}}};
        const RunResult m = run(sim_config(dir, "m", init));
        json qextra = init;
        qextra["representation"] = "quaternion";
        const RunResult q = run(sim_config(dir, "q", qextra));
        REQUIRE(m.metadata.at(0).at("stats").at("degenerate_targets") == 0);
        REQUIRE(q.metadata.at(0).at("stats").at("degenerate_targets") == 0);
        std::ifstream fm(dir.path / "m_r0.ndjson"), fq(dir.path / "q_r0.ndjson");
        const auto rm = read_frames(fm), rq = read_frames(fq);
        REQUIRE(rm.size() == rq.size());
        for (std::size_t i = 0; i < rm.size(); ++i) {
            REQUIRE(rm[i].kind == "mat");
            REQUIRE(rq[i].kind == "quat");
            Mat3 a;
            for (int k = 0; k < 9; ++k) a(k / 3, k % 3) = rm[i].v[k];
            const auto& v = rq[i].v;
            const Mat3 b = quat_to_rot(UnitQuaternion(v[0], v[1], v[2], v[3]));
            CHECK((a - b).norm() < 1e-8);
            CHECK((rm[i].x - rq[i].x).norm() < 1e-8);
        }
    }
    SUBCASE("empty run") {
        const RunResult r = run(sim_config(dir, "e", {{"t_end", 0.0}, {"model", "gradual"}}));
        CHECK(slurp(dir.path / "e_r0.ndjson").empty());
        const json meta = json::parse(slurp(dir.path / "e_r0.meta.json"));
        CHECK(meta.at("stats").at("frames") == 0);
        CHECK(r.outputs.size() == 2);
    }
    SUBCASE("replicas write separate files") {
        const RunResult r = run(sim_config(dir, "rep", {{"replicas", 3}, {"model", "gradual"}}));
        for (int k = 0; k < 3; ++k) CHECK(fs::exists(dir.path / ("rep_r" + std::to_string(k) + ".ndjson")));
        CHECK(slurp(dir.path / "rep_r0.ndjson") != slurp(dir.path / "rep_r1.ndjson"));
        CHECK(r.metadata.size() == 3);
    }
}

TEST_CASE("other run modes") {
    TempDir dir;
    const json out = {{"dir", dir.path.string()}, {"prefix", "x"}};
    SUBCASE("constants") {
        run(config_from_json({{"mode", "constants"}, {"gci", {{"D_values", {1.0}}}}, {"output", out}}));
        const std::string csv = slurp(dir.path / "x_constants.csv");
        CHECK(csv == "D,c1\n1," + format_double(c1(1.0)) + "\n");
    }
    SUBCASE("gci") {
        const RunResult r = run(config_from_json(
            {{"mode", "gci"}, {"gci", {{"D_values", {0.5, 2.0}}, {"models", {"jump"}}}}, {"output", out}}));
        const std::string csv = slurp(dir.path / "x_gci.csv");
        CHECK(csv.rfind("D,model,c1,c2,c2p,c3,c4\n0.5,jump,", 0) == 0);
        CHECK(count_lines(csv) == 3);
        CHECK(r.metadata.at(0).at("constants").size() == 2);
    }
    SUBCASE("single") {
        run(config_from_json({{"mode", "single"}, {"model", "gradual"}, {"t_end", 0.1}, {"dt", 0.01},
                              {"save_every", 2}, {"output", out}}));
        CHECK(count_lines(slurp(dir.path / "x_r0.ndjson")) == 5);
    }
    SUBCASE("macro") {
        const RunResult r = run(config_from_json(
            {{"mode", "macro"}, {"macro", {{"n", {16, 1, 1}}, {"steps", 10}, {"save_every", 5}}}, {"output", out}}));
        const std::string csv = slurp(dir.path / "x_macro.csv");
        CHECK(count_lines(csv) == 1 + 3 * 16);
        CHECK(r.metadata.at(0).at("macro").at("integrator") == "heun");
    }
}

TEST_CASE("parallel_for covers every index once") {
    for (unsigned threads : {1u, 2u, 4u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) ++hits[i];
        }, 10);
        for (int h : hits) REQUIRE(h == 1);
    }
    CHECK(default_thread_count() >= 1);
}
