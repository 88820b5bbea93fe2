/*
End-to-end CLI tests: drives the installed binary as a subprocess through
construct, capacity, simulate, and decode workflows, checking exit codes,
summary lines, output files, and byte-level determinism of repeated runs.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "polarlat/codec.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int rc = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PLCLI_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, k);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path);
    f << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// first line of `text` that starts with `prefix`, or ""
std::string line_with(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line;
    return {};
}

// shared fixture: the reference two-level design, constructed once
const fs::path& workspace() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "plc_cli_work";
        fs::remove_all(d);
        fs::create_directories(d);
        write_file(d / "ref.json", R"({
            "chain": "z", "r": 2, "N": 1024, "sigma": 0.3380,
            "rule": "equal_error", "target_pe": 1e-5, "mu": 128, "seed": 1
        })");
        const RunResult r = run_cli("construct --config " + (d / "ref.json").string() +
                                    " --out-dir " + (d / "ref").string());
        REQUIRE(r.rc == 0);
        write_file(d / "ref_summary.txt", r.out);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("usage errors and help") {
    CHECK(run_cli("").rc == 2);
    CHECK(run_cli("frobnicate").rc == 2);
    CHECK(run_cli("construct").rc == 2);  // --config is required

    const RunResult help = run_cli("--help");
    CHECK(help.rc == 0);
    CHECK(help.out.find("construct") != std::string::npos);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("reference two-level construction") {
    const fs::path& d = workspace();
    const std::string out = read_file(d / "ref_summary.txt");

    double r1 = 0.0, r2 = 0.0;
    int lvl = 0;
    REQUIRE(std::sscanf(line_with(out, "level 1:").c_str(), "level %d: rate %lf", &lvl,
                        &r1) == 2);
    REQUIRE(std::sscanf(line_with(out, "level 2:").c_str(), "level %d: rate %lf", &lvl,
                        &r2) == 2);
    CHECK(std::abs(r1 - 0.23) < 0.02);
    CHECK(std::abs(r2 - 0.90) < 0.02);

    double e1 = 0.0, e3 = 0.0, bits = 0.0, db = 0.0;
    REQUIRE(std::sscanf(line_with(out, "gap:").c_str(),
                        "gap: eps1 %lf eps3 %lf bits %lf db %lf", &e1, &e3, &bits,
                        &db) == 4);
    CHECK(std::abs(db - 2.34) < 0.1);

    CHECK(out.find("nesting: valid") != std::string::npos);
    CHECK(fs::exists(d / "ref" / "spec.json"));

    // the written spec is the summary's design
    const auto spec = pl::PolarLatticeSpec::from_json(read_file(d / "ref" / "spec.json"));
    CHECK(spec.N == 1024);
    CHECK(std::abs(spec.levels[0].rate() - r1) < 1e-6);
    CHECK(std::abs(spec.levels[1].rate() - r2) < 1e-6);
}

TEST_CASE("construction is reproducible and honors the seed override") {
    const fs::path& d = workspace();
    write_file(d / "tiny.json", R"({
        "chain": "z", "r": 1, "N": 16, "sigma": 0.6,
        "rule": "equal_error", "target_pe": 1e-2, "mu": 16, "seed": 3
    })");
    const std::string cfg = (d / "tiny.json").string();
    REQUIRE(run_cli("construct --config " + cfg + " --out-dir " + (d / "t1").string())
                .rc == 0);
    REQUIRE(run_cli("construct --config " + cfg + " --out-dir " + (d / "t2").string())
                .rc == 0);
    CHECK(read_file(d / "t1" / "spec.json") == read_file(d / "t2" / "spec.json"));

    REQUIRE(run_cli("construct --config " + cfg + " --out-dir " + (d / "t3").string() +
                    " --seed 9")
                .rc == 0);
    const auto s3 = pl::PolarLatticeSpec::from_json(read_file(d / "t3" / "spec.json"));
    CHECK(s3.seed == 9);
}

TEST_CASE("shaped construction reports the shaping structure") {
    const fs::path& d = workspace();
    // same design family as the reference shaped construction, scaled down to
    // N=1024 and mu=32 so the whole suite stays inside its time budget; the
    // qualitative structure (top level almost all shaping, bottom level almost
    // all frozen) is what the summary must show
    write_file(d / "shaped.json", R"({
        "chain": "z", "r": 5, "N": 1024, "shaped": true,
        "sigma_s": 3.0, "snr_db": 15.0, "mu": 32, "seed": 1
    })");
    const RunResult r = run_cli("construct --config " + (d / "shaped.json").string() +
                                " --out-dir " + (d / "shaped").string());
    REQUIRE(r.rc == 0);

    int lvl = 0;
    double rate = 0.0;
    std::size_t info = 0, shaping = 0, frozen = 0;
    REQUIRE(std::sscanf(line_with(r.out, "level 5:").c_str(),
                        "level %d: rate %lf info %zu shaping %zu frozen %zu", &lvl, &rate,
                        &info, &shaping, &frozen) == 5);
    CHECK(shaping > 512);  // top level is almost entirely shaping
    REQUIRE(std::sscanf(line_with(r.out, "level 1:").c_str(),
                        "level %d: rate %lf info %zu shaping %zu frozen %zu", &lvl, &rate,
                        &info, &shaping, &frozen) == 5);
    CHECK(frozen > 512);  // bottom level is almost entirely frozen
    CHECK(line_with(r.out, "shaping: sigma_s 3").size() > 0);
    CHECK(fs::exists(d / "shaped" / "spec.json"));

    // shaping noise too coarse: rejected as numerically unsound
    write_file(d / "shaped_bad.json", R"({
        "chain": "z", "r": 1, "N": 64, "shaped": true,
        "sigma_s": 0.5, "snr_db": 10.0, "mu": 16, "seed": 1
    })");
    CHECK(run_cli("construct --config " + (d / "shaped_bad.json").string() +
                  " --out-dir " + (d / "sb").string())
              .rc == 3);
}

TEST_CASE("capacity command writes the curve") {
    const fs::path& d = workspace();
    write_file(d / "cap.json", R"({"chain": "z", "r": 2, "sigma_grid": [0.169, 0.338]})");
    const RunResult r = run_cli("capacity --config " + (d / "cap.json").string() +
                                " --out-dir " + (d / "cap").string());
    REQUIRE(r.rc == 0);

    const std::string csv = read_file(d / "cap" / "capacity.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "sigma_or_snr,level,value");
    double v11 = 0.0, v12 = 0.0, v21 = 0.0, v22 = 0.0;
    double axis;
    int lvl;
    char c;
    std::getline(in, line);
    std::istringstream(line) >> axis >> c >> lvl >> c >> v11;
    std::getline(in, line);
    std::istringstream(line) >> axis >> c >> lvl >> c >> v12;
    std::getline(in, line);
    std::istringstream(line) >> axis >> c >> lvl >> c >> v21;
    std::getline(in, line);
    std::istringstream(line) >> axis >> c >> lvl >> c >> v22;
    CHECK(std::abs(v11 - 0.987311) < 1e-5);
    CHECK(std::abs(v21 - 0.514547) < 1e-5);
    CHECK(std::abs(v22 - v11) < 1e-9);  // scaling: level 2 at 2*sigma is level 1 at sigma

    write_file(d / "cap_empty.json", R"({"chain": "z", "r": 2, "sigma_grid": []})");
    CHECK(run_cli("capacity --config " + (d / "cap_empty.json").string() + " --out-dir " +
                  (d / "cap2").string())
              .rc == 2);

    write_file(d / "cap_chain.json", R"({"chain": "z3", "r": 2, "sigma_grid": [0.3]})");
    const RunResult bad = run_cli("capacity --config " + (d / "cap_chain.json").string() +
                                  " --out-dir " + (d / "cap3").string());
    CHECK(bad.rc == 2);
    CHECK(bad.out.find("z2") != std::string::npos);  // error names the valid chains
}

TEST_CASE("simulate command is deterministic across runs and thread counts") {
    const fs::path& d = workspace();
    write_file(d / "plan.json", R"({
        "spec_file": "ref/spec.json", "axis": "vnr_db", "grid_db": [0.0],
        "min_errors": 40, "max_trials": 300, "master_seed": 7
    })");
    const std::string plan = (d / "plan.json").string();

    const RunResult r1 = run_cli("simulate --plan " + plan + " --out-dir " +
                                 (d / "s1").string());
    REQUIRE(r1.rc == 0);
    CHECK(line_with(r1.out, "point 0 dB:").size() > 0);
    REQUIRE(fs::exists(d / "s1" / "results.csv"));
    REQUIRE(fs::exists(d / "s1" / "results.json"));

    const std::string csv = read_file(d / "s1" / "results.csv");
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "axis_db,trials,block_errors,bler,bler_ci_lo,bler_ci_hi,ser,runtime_s");

    // identical seed => identical results up to the wall-clock column
    auto mask_runtime = [](std::string text) {
        std::istringstream is(text);
        std::string line, out;
        bool first = true;
        while (std::getline(is, line)) {
            if (!first) line.erase(line.rfind(','));
            first = false;
            out += line + "\n";
        }
        return out;
    };
    const RunResult r2 = run_cli("simulate --plan " + plan + " --out-dir " +
                                 (d / "s2").string());
    REQUIRE(r2.rc == 0);
    CHECK(mask_runtime(read_file(d / "s2" / "results.csv")) == mask_runtime(csv));

    const RunResult r3 = run_cli("--threads 2 simulate --plan " + plan + " --out-dir " +
                                 (d / "s3").string());
    REQUIRE(r3.rc == 0);
    CHECK(mask_runtime(read_file(d / "s3" / "results.csv")) == mask_runtime(csv));

    // the sampled point saw real errors under its stop rule
    long trials = 0, errors = 0;
    {
        std::string line;
        std::getline(in, line);
        double db;
        char c;
        std::istringstream(line) >> db >> c >> trials >> c >> errors;
    }
    CHECK(errors >= 40);
    CHECK(trials <= 300);

    write_file(d / "plan_bad.json", R"({
        "spec_file": "missing/spec.json", "axis": "vnr_db", "grid_db": [0.0]
    })");
    CHECK(run_cli("simulate --plan " + (d / "plan_bad.json").string() + " --out-dir " +
                  (d / "s4").string())
              .rc == 2);
}

TEST_CASE("decode command recovers an encoded block") {
    const fs::path& d = workspace();
    const auto spec = pl::PolarLatticeSpec::from_json(read_file(d / "ref" / "spec.json"));

    std::vector<std::uint8_t> message(spec.message_bits());
    for (std::size_t i = 0; i < message.size(); ++i) message[i] = (i % 3) & 1;
    const pl::Codeword cw = pl::encode_construction_d(spec, message);

    std::ostringstream ys;
    for (double v : cw.x) ys << v << "\n";
    write_file(d / "y.txt", ys.str());

    const RunResult r = run_cli("decode --spec " + (d / "ref" / "spec.json").string() +
                                " --in " + (d / "y.txt").string() + " --sigma 0.3380" +
                                " --out-dir " + (d / "dec").string());
    REQUIRE(r.rc == 0);
    CHECK(line_with(r.out, "decoded 1024 symbols").size() > 0);

    const auto doc = nlohmann::json::parse(read_file(d / "dec" / "decoded.json"));
    const std::vector<int> want(message.begin(), message.end());
    CHECK(doc.at("message").get<std::vector<int>>() == want);

    // wrong coordinate count is a usage error
    write_file(d / "y_short.txt", "0.0 1.0 2.0\n");
    const RunResult bad = run_cli("decode --spec " + (d / "ref" / "spec.json").string() +
                                  " --in " + (d / "y_short.txt").string() +
                                  " --out-dir " + (d / "dec2").string());
    CHECK(bad.rc == 2);
    CHECK(bad.out.find("expected 1024") != std::string::npos);
}
