#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sohb/sohb.h"

namespace {

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string prefix;
};

// Exit status 2 for errors; 1 is reserved for failed criteria.
int report(int status) {
    std::cerr << "sohb: " << sohb_status_name(status) << ": " << sohb_last_error() << "\n";
    return 2;
}

std::string fmt(double x) {
    char buf[64];
    if (sohb_format_double(x, buf, sizeof buf, nullptr) != SOHB_OK) return std::to_string(x);
    return buf;
}

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("-c,--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override the configuration seed");
    cmd->add_option("-o,--out", o.out_dir, "Output directory");
    cmd->add_option("--prefix", o.prefix, "Output file prefix");
}

int run_config(const char* mode, const RunOptions& o) {
    sohb_config* cfg = nullptr;
    int st = sohb_config_load(o.config.c_str(), o.seed.has_value(), o.seed.value_or(0), &cfg);
    if (st != SOHB_OK) return report(st);
    st = sohb_config_set_mode(cfg, mode);
    if (st == SOHB_OK && (!o.out_dir.empty() || !o.prefix.empty()))
        st = sohb_config_set_output(cfg, o.out_dir.empty() ? nullptr : o.out_dir.c_str(),
                                    o.prefix.empty() ? nullptr : o.prefix.c_str());
    int passed = 1;
    if (st == SOHB_OK)
        st = sohb_run(
            cfg, [](const char* path, void*) { std::cout << path << "\n"; }, nullptr, &passed);
    sohb_config_free(cfg);
    if (st != SOHB_OK) return report(st);
    return passed ? 0 : 1;
}

int print_constants(const std::vector<double>& Ds) {
    std::cout << "D,c1\n";
    for (double D : Ds) {
        double c = 0.0;
        if (int st = sohb_c1(D, &c); st != SOHB_OK) return report(st);
        std::cout << fmt(D) << "," << fmt(c) << "\n";
    }
    return 0;
}

int print_gci(const std::vector<double>& Ds, const std::vector<std::string>& models) {
    std::cout << sohb_constants_csv_header() << "\n";
    for (double D : Ds) {
        for (const auto& m : models) {
            sohb_constants k;
            const int model = m == "gradual" ? SOHB_MODEL_GRADUAL : SOHB_MODEL_JUMP;
            if (int st = sohb_gci_constants(D, model, &k); st != SOHB_OK) return report(st);
            char row[512];
            if (int st = sohb_constants_csv_row(&k, row, sizeof row, nullptr); st != SOHB_OK) return report(st);
            std::cout << row << "\n";
        }
    }
    return 0;
}

int validate(const std::vector<int>& only, std::uint64_t seed) {
    std::printf("%-6s %-4s %-40s %9s  %s\n", "result", "id", "criterion", "seconds", "detail");
    std::fflush(stdout);
    int all_passed = 0;
    const int st = sohb_validate(
        only.data(), only.size(), seed,
        [](int id, const char* name, int passed, double seconds, const char* detail, void*) {
            std::printf("%-6s %-4d %-40s %9.1f  %s\n", passed ? "PASS" : "FAIL", id, name, seconds, detail);
            std::fflush(stdout);
        },
        nullptr, &all_passed);
    if (st != SOHB_OK) return report(st);
    std::printf("%s\n", all_passed ? "all criteria passed" : "some criteria failed");
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-organized hydrodynamics of body-attitude coordination"};
    app.set_version_flag("--version", std::string(sohb_version()));
    app.require_subcommand(1);

    RunOptions sim_opts, single_opts, macro_opts;
    add_run_options(app.add_subcommand("simulate", "Run the particle model and write NDJSON frames"), sim_opts);
    add_run_options(app.add_subcommand("single", "Single agent in a constant field"), single_opts);
    add_run_options(app.add_subcommand("macro", "Integrate the macroscopic equations"), macro_opts);

    std::vector<double> const_D;
    auto* constants = app.add_subcommand("constants", "Print c1(D) as CSV");
    constants->add_option("--D", const_D, "Noise intensities")->required()->check(CLI::PositiveNumber);

    std::vector<double> gci_D;
    std::vector<std::string> gci_models{"jump"};
    auto* gci = app.add_subcommand("gci", "Print the macroscopic coefficients as CSV");
    gci->add_option("--D", gci_D, "Noise intensities")->required()->check(CLI::PositiveNumber);
    gci->add_option("--model", gci_models, "gradual or jump")->check(CLI::IsMember({"gradual", "jump"}));

    std::vector<int> only;
    std::uint64_t seed = 20240601;
    auto* val = app.add_subcommand("validate", "Run the acceptance criteria and print a verdict table");
    val->add_option("--only", only, "Criterion ids (comma separated)")
        ->delimiter(',')
        ->check(CLI::Range(1, sohb_criterion_count()));
    val->add_option("--seed", seed, "Base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    int rc = 2;
    if (app.got_subcommand("simulate")) rc = run_config("simulate", sim_opts);
    else if (app.got_subcommand("single")) rc = run_config("single", single_opts);
    else if (app.got_subcommand("macro")) rc = run_config("macro", macro_opts);
    else if (*constants) rc = print_constants(const_D);
    else if (*gci) rc = print_gci(gci_D, gci_models);
    else if (*val) rc = validate(only, seed);
    return rc;
}
