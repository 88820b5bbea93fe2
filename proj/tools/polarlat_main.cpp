/*
polarlat: construct polar-lattice designs, tabulate capacity curves, run
seeded Monte Carlo sweeps, and decode single blocks, all through the shared
library's C API.

Exit codes: 0 success, 2 usage or file error, 3 failed numerical soundness.
*/

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

#include <polarlat.h>

namespace {

int finish(plc_status st, char* summary, bool verbose, const std::string& label) {
    if (verbose) std::fprintf(stderr, "[%s] status %d\n", label.c_str(), st);
    if (summary) {
        std::fputs(summary, stdout);
        plc_string_free(summary);
    }
    if (st == PLC_OK) return 0;
    std::fprintf(stderr, "error: %s\n", plc_last_error());
    return st == PLC_ENUMERIC ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polar lattice construction, analysis, and simulation"};
    app.require_subcommand(1);

    int threads = 1;
    bool verbose = false;
    app.add_option("--threads", threads, "worker pool cap for simulation");
    app.add_flag("-v,--verbose", verbose, "report status details on stderr");

    std::string config_path, plan_path, spec_path, y_path;
    std::string out_dir = ".";
    std::int64_t seed_override = -1;
    double sigma = 0.0;

    CLI::App* construct = app.add_subcommand("construct", "design a polar lattice spec");
    construct->add_option("--config", config_path, "construct config JSON")->required();
    construct->add_option("--out-dir", out_dir, "output directory");
    construct->add_option("--seed", seed_override, "override the config seed");

    CLI::App* capacity = app.add_subcommand("capacity", "tabulate capacity or MI curves");
    capacity->add_option("--config", config_path, "capacity config JSON")->required();
    capacity->add_option("--out-dir", out_dir, "output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo plan");
    simulate->add_option("--plan", plan_path, "experiment plan JSON")->required();
    simulate->add_option("--out-dir", out_dir, "output directory");

    CLI::App* decode = app.add_subcommand("decode", "decode one observed block");
    decode->add_option("--spec", spec_path, "spec JSON file")->required();
    decode->add_option("--in", y_path, "observed coordinates, whitespace separated")
        ->required();
    decode->add_option("--sigma", sigma, "channel noise (default: the design noise)");
    decode->add_option("--out-dir", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    char* summary = nullptr;
    plc_status st;
    std::string label;
    if (construct->parsed()) {
        st = plc_cmd_construct(config_path.c_str(), out_dir.c_str(), seed_override,
                               &summary);
        label = "construct";
    } else if (capacity->parsed()) {
        st = plc_cmd_capacity(config_path.c_str(), out_dir.c_str(), &summary);
        label = "capacity";
    } else if (simulate->parsed()) {
        st = plc_cmd_simulate(plan_path.c_str(), out_dir.c_str(), threads, &summary);
        label = "simulate";
    } else {
        st = plc_cmd_decode(spec_path.c_str(), y_path.c_str(), sigma, out_dir.c_str(),
                            &summary);
        label = "decode";
    }
    return finish(st, summary, verbose, label);
}
