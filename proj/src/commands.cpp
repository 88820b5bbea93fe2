// Command workflows: config parsing, the construction pipeline, and the
// file-in/file-out bodies of the CLI subcommands.

#include "polarlat/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polarlat/analysis.hpp"
#include "polarlat/channel.hpp"
#include "polarlat/sim.hpp"

namespace pl {
namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << text;
}

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string(what) + " is not valid JSON: " + e.what());
    }
}

int chain_dim(const std::string& name) {
    if (name == "z") return 1;
    if (name == "z2") return 2;
    throw std::invalid_argument("chain must be one of: \"z\", \"z2\" (got \"" + name + "\")");
}

template <typename... Args>
void addf(std::string& s, const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    s += buf;
}

void add_level_lines(std::string& s, const PolarLatticeSpec& spec) {
    for (const auto& lv : spec.levels)
        addf(s, "level %d: rate %.6f info %zu shaping %zu frozen %zu z-sum %.4g\n",
             lv.level, lv.rate(), lv.info.size(), lv.shaping.size(), lv.frozen.size(),
             lv.info_z_sum());
}

}  // namespace

ConstructConfig parse_construct_config(const std::string& text) {
    const json j = parse_json(text, "construct config");
    try {
        ConstructConfig cfg;
        cfg.n = chain_dim(j.value("chain", "z"));
        if (j.contains("r")) cfg.r = j["r"].get<int>();
        if (j.contains("N")) cfg.N = j["N"].get<int>();
        cfg.rule = j.value("rule", cfg.rule);
        if (cfg.rule != "equal_error" && cfg.rule != "capacity")
            throw std::invalid_argument(
                "rule must be one of: \"equal_error\", \"capacity\" (got \"" + cfg.rule + "\")");
        if (j.contains("target_pe")) cfg.target_pe = j["target_pe"].get<double>();
        if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
        if (j.contains("mu")) cfg.mu = j["mu"].get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        cfg.shaped = j.value("shaped", false);
        if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
        if (j.contains("sigma_s")) cfg.sigma_s = j["sigma_s"].get<double>();
        if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<double>();
        return cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("construct config: ") + e.what());
    }
}

PolarLatticeSpec design_spec(const ConstructConfig& cfg) {
    if (cfg.r < 1) throw std::invalid_argument("r must be >= 1");
    if (cfg.mu < 2) throw std::invalid_argument("mu must be >= 2");
    if (cfg.rule == "equal_error" && !(cfg.target_pe > 0 && cfg.target_pe < 1))
        throw std::invalid_argument("target_pe must be in (0, 1)");
    const double threshold =
        cfg.threshold > 0 ? cfg.threshold : default_selection_threshold(cfg.N);

    PolarLatticeSpec spec;
    spec.n = cfg.n;
    spec.r = cfg.r;
    spec.N = cfg.N;
    spec.seed = cfg.seed;

    if (cfg.shaped) {
        if (cfg.n != 1)
            throw std::invalid_argument("shaped designs use the one-dimensional chain");
        if (!(cfg.sigma_s > 0)) throw std::invalid_argument("sigma_s must be positive");
        spec.shaped = true;
        spec.sigma_s = cfg.sigma_s;
        spec.support_radius = required_support_radius(cfg.sigma_s);

        bool ok = true;
        const double eps = flatness_factor(spec.chain(), 0, cfg.sigma_s, &ok);
        if (!ok || eps > 0.01) {
            std::ostringstream msg;
            msg << "flatness factor " << eps << " at sigma_s=" << cfg.sigma_s
                << " exceeds 0.01; the shaping distribution is too far from uniform"
                   " modulo the top lattice";
            throw NumericError(msg.str());
        }

        const DiscreteGaussianSpec gs{cfg.sigma_s, cfg.r, spec.support_radius};
        const DiscreteGaussianPmf pmf = discrete_gaussian_pmf(gs);
        spec.sigma = sigma_for_snr_db(pmf.power(), cfg.snr_db);
        for (int ell = 1; ell <= cfg.r; ++ell) {
            const auto zc = evolve_subchannels(
                quantize_shaped_level_channel(pmf, ell, spec.sigma, cfg.mu), cfg.N, cfg.mu);
            const auto zs =
                evolve_subchannels(shaped_source_channel(pmf, ell), cfg.N, cfg.mu);
            LevelCodeSpec lv = select_sets_asymmetric(zc, zs, threshold);
            lv.level = ell;
            spec.levels.push_back(std::move(lv));
        }
    } else {
        if (!(cfg.sigma > 0)) throw std::invalid_argument("sigma must be positive");
        spec.sigma = cfg.sigma;
        std::vector<int> prev_info;  // carried up so equal-error levels nest
        for (int ell = 1; ell <= cfg.r; ++ell) {
            std::vector<double> pe;
            const auto z = evolve_subchannels(
                quantize_level_channel(spec.chain(), ell, cfg.sigma, cfg.mu), cfg.N,
                cfg.mu, &pe);
            LevelCodeSpec lv =
                cfg.rule == "equal_error"
                    ? select_sets_equal_error(z, pe, cfg.target_pe / (cfg.r + 1), prev_info)
                    : select_sets_capacity(z, threshold);
            prev_info = lv.info;
            lv.level = ell;
            spec.levels.push_back(std::move(lv));
        }
    }
    spec.validate();
    return spec;
}

std::string construct_summary(const PolarLatticeSpec& spec) {
    std::string s;
    addf(s, "design: chain %s r %d N %d sigma %.6g%s\n", spec.n == 1 ? "z" : "z2", spec.r,
         spec.N, spec.sigma, spec.shaped ? " shaped" : "");
    add_level_lines(s, spec);

    double sum_rate = 0.0;
    for (const auto& lv : spec.levels) sum_rate += lv.rate();
    addf(s, "sum rate: %.6f bits/symbol\n", sum_rate);
    addf(s, "union bound: %.4g\n", union_bound_pe(spec));

    const NestingCertificate cert = certify_nesting(spec.levels);
    if (cert.valid)
        s += "nesting: valid\n";
    else
        addf(s, "nesting: INVALID at pair %d\n", cert.first_bad);

    if (spec.shaped) {
        const DiscreteGaussianSpec gs{spec.sigma_s, spec.r, spec.support_radius};
        const double power = discrete_gaussian_pmf(gs).power();
        bool ok = true;
        const double eps = flatness_factor(spec.chain(), 0, spec.sigma_s, &ok);
        addf(s, "shaping: sigma_s %.6g support %d power %.6f snr_db %.6f flatness %.4g\n",
             spec.sigma_s, spec.support_radius, power,
             snr_db_for_sigma(power, spec.sigma), ok ? eps : INFINITY);
    } else {
        const GapReport g = gap_report(spec, spec.sigma);
        addf(s, "gap: eps1 %.6f eps3 %.6f bits %.6f db %.6f%s\n", g.eps1, g.eps3,
             g.log_vnr_gap_bits, g.gap_db, g.capacity_rule_violated ? " (rate above capacity)" : "");
    }
    return s;
}

CapacityConfig parse_capacity_config(const std::string& text) {
    const json j = parse_json(text, "capacity config");
    try {
        CapacityConfig cfg;
        cfg.shaped = j.value("shaped", false);
        if (cfg.shaped) {
            if (!(j.contains("sigma_s") && j.contains("snr_grid") && j.contains("levels")))
                throw std::invalid_argument(
                    "shaped capacity config needs sigma_s, snr_grid, and levels");
            cfg.sigma_s = j["sigma_s"].get<double>();
            cfg.snr_grid = j["snr_grid"].get<std::vector<double>>();
            cfg.levels = j["levels"].get<int>();
            if (j.contains("samples")) cfg.samples = j["samples"].get<long>();
            if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        } else {
            cfg.n = chain_dim(j.value("chain", "z"));
            if (j.contains("r")) cfg.r = j["r"].get<int>();
            if (!j.contains("sigma_grid"))
                throw std::invalid_argument("capacity config needs sigma_grid");
            cfg.sigma_grid = j["sigma_grid"].get<std::vector<double>>();
        }
        return cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("capacity config: ") + e.what());
    }
}

std::string cmd_construct(const std::string& config_path, const std::string& out_dir,
                          std::int64_t seed_override) {
    ConstructConfig cfg = parse_construct_config(read_file(config_path, "config file"));
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    const PolarLatticeSpec spec = design_spec(cfg);
    const auto out = std::filesystem::path(out_dir) / "spec.json";
    write_file(out, spec.to_json());
    return construct_summary(spec) + "wrote " + out.string() + "\n";
}

std::string cmd_capacity(const std::string& config_path, const std::string& out_dir) {
    const CapacityConfig cfg = parse_capacity_config(read_file(config_path, "config file"));
    const CapacityCurve curve =
        cfg.shaped ? shaped_mi_curve(cfg.sigma_s, cfg.snr_grid, cfg.levels, cfg.samples,
                                     cfg.seed)
                   : partition_capacity_curve({cfg.n, cfg.r}, cfg.sigma_grid);
    const auto out = std::filesystem::path(out_dir) / "capacity.csv";
    write_file(out, curve.to_csv());
    std::string s;
    addf(s, "%zu curve points over %zu grid values\n", curve.values.size(),
         curve.axis.size());
    return s + "wrote " + out.string() + "\n";
}

std::string cmd_simulate(const std::string& plan_path, const std::string& out_dir,
                         int threads) {
    const ExperimentPlan plan = load_plan(plan_path);
    const auto records = run_experiment(plan, threads);
    const auto csv = std::filesystem::path(out_dir) / "results.csv";
    const auto js = std::filesystem::path(out_dir) / "results.json";
    write_file(csv, results_to_csv(records));
    write_file(js, results_to_json(records));
    std::string s;
    for (const auto& r : records)
        addf(s, "point %.6g dB: trials %ld bler %.4g [%.4g, %.4g]\n", r.axis_db, r.trials,
             r.bler, r.bler_ci_lo, r.bler_ci_hi);
    return s + "wrote " + csv.string() + " and " + js.string() + "\n";
}

std::string cmd_decode(const std::string& spec_path, const std::string& y_path,
                       double sigma, const std::string& out_dir) {
    const PolarLatticeSpec spec =
        PolarLatticeSpec::from_json(read_file(spec_path, "spec file"));
    std::istringstream in(read_file(y_path, "observation file"));
    LatticePoint y;
    double v;
    while (in >> v) y.push_back(v);
    if (static_cast<int>(y.size()) != spec.n * spec.N) {
        std::ostringstream msg;
        msg << "observation file has " << y.size() << " coordinates, expected "
            << spec.n * spec.N;
        throw std::invalid_argument(msg.str());
    }
    const double use_sigma = sigma > 0 ? sigma : spec.sigma;
    const DecodeResult res = multistage_decode(spec, y, use_sigma);

    json out{{"sigma", use_sigma}};
    out["message"] = res.message;
    out["x"] = res.x;
    const auto path = std::filesystem::path(out_dir) / "decoded.json";
    write_file(path, out.dump(2) + "\n");
    std::string s;
    addf(s, "decoded %d symbols at sigma %.6g, %zu message bits\n", spec.N, use_sigma,
         res.message.size());
    return s + "wrote " + path.string() + "\n";
}

}  // namespace pl
