// Monte Carlo sweep harness: seeded trials, stop rules, Wilson intervals, and
// CSV/JSON persistence. Trials are keyed by (master_seed, grid index, trial
// index), so chunked multi-threaded runs fold to the same records as serial.

#include "polarlat/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polarlat/analysis.hpp"
#include "polarlat/rng.hpp"

namespace pl {
namespace {

using json = nlohmann::ordered_json;

struct TrialOutcome {
    bool block = false;
    int sym = 0;    // differing coordinates
    int first = 0;  // first level in error (0-based), r = uncoded remainder
};

TrialOutcome run_trial(const PolarLatticeSpec& spec, double sigma, std::uint64_t seed) {
    Xoshiro256 bits(mix2(seed, 0x6d7367ULL));
    std::vector<std::uint8_t> msg(spec.message_bits());
    for (auto& b : msg) b = static_cast<std::uint8_t>(bits.bounded(2));

    const Codeword cw =
        spec.shaped ? encode_shaped(spec, msg) : encode_construction_d(spec, msg);

    GaussianStream noise(mix2(seed, 0x6177676eULL));
    LatticePoint y = cw.x;
    for (double& v : y) v += sigma * noise.next();

    const DecodeResult res = multistage_decode(spec, y, sigma);

    TrialOutcome o;
    for (std::size_t i = 0; i < cw.x.size(); ++i)
        if (std::lround(res.x[i]) != std::lround(cw.x[i])) ++o.sym;
    o.block = o.sym > 0;
    if (o.block) {
        o.first = spec.r;
        for (int l = 0; l < spec.r && o.first == spec.r; ++l)
            if (res.u[l] != cw.u[l]) o.first = l;
    }
    return o;
}

TrialRecord run_point(const PolarLatticeSpec& spec, double db, double sigma,
                      const ExperimentPlan& plan, std::size_t grid_index, int threads) {
    TrialRecord rec;
    rec.axis_db = db;
    rec.coords_per_block = static_cast<long>(spec.n) * spec.N;
    rec.first_error_by_level.assign(spec.r + 1, 0);

    const auto t0 = std::chrono::steady_clock::now();
    const long workers = std::max(threads, 1);
    std::vector<TrialOutcome> buf;
    long done = 0;
    bool stop = false;
    while (!stop && done < plan.max_trials) {
        const long k = std::min<long>(plan.max_trials - done, workers * 32);
        buf.assign(k, {});
        auto worker = [&](long j0, long j1) {
            for (long j = j0; j < j1; ++j)
                buf[j] = run_trial(spec, sigma,
                                   mix3(plan.master_seed, grid_index + 1,
                                        static_cast<std::uint64_t>(done + j) + 1));
        };
        if (workers > 1) {
            std::vector<std::thread> pool;
            const long step = (k + workers - 1) / workers;
            for (long j0 = 0; j0 < k; j0 += step)
                pool.emplace_back(worker, j0, std::min(j0 + step, k));
            for (auto& t : pool) t.join();
        } else {
            worker(0, k);
        }
        // fold in trial order so the stop point is schedule-independent
        for (long j = 0; j < k; ++j) {
            ++rec.trials;
            if (buf[j].block) {
                ++rec.block_errors;
                rec.symbol_errors += buf[j].sym;
                ++rec.first_error_by_level[buf[j].first];
            }
            if (rec.block_errors >= plan.min_errors) {
                stop = true;
                break;
            }
        }
        done += k;
    }
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const Interval ci = wilson95(rec.block_errors, rec.trials);
    rec.bler = rec.trials ? static_cast<double>(rec.block_errors) / rec.trials : 0.0;
    rec.bler_ci_lo = ci.lo;
    rec.bler_ci_hi = ci.hi;
    return rec;
}

double point_ser(const TrialRecord& r) {
    const double denom = static_cast<double>(r.trials) * r.coords_per_block;
    return denom > 0 ? r.symbol_errors / denom : 0.0;
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void ExperimentPlan::validate() const {
    spec.validate();
    if (min_errors < 1) throw std::invalid_argument("min_errors must be >= 1");
    if (max_trials < min_errors)
        throw std::invalid_argument("max_trials must be >= min_errors");
    if (grid_db.empty()) throw std::invalid_argument("grid is empty");
    for (std::size_t i = 1; i < grid_db.size(); ++i)
        if (!(grid_db[i] > grid_db[i - 1]))
            throw std::invalid_argument("grid must be strictly increasing");
    if (axis == SweepAxis::SnrDb && !spec.shaped)
        throw std::invalid_argument("snr axis requires a shaped spec");
}

Interval wilson95(long errors, long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = errors / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, int threads) {
    plan.validate();
    double power = 0.0;
    if (plan.axis == SweepAxis::SnrDb) {
        const DiscreteGaussianSpec g{plan.spec.sigma_s, plan.spec.r,
                                     plan.spec.support_radius};
        power = discrete_gaussian_pmf(g).power();
    }
    std::vector<TrialRecord> out;
    out.reserve(plan.grid_db.size());
    for (std::size_t gi = 0; gi < plan.grid_db.size(); ++gi) {
        const double db = plan.grid_db[gi];
        const double sigma = plan.axis == SweepAxis::VnrDb
                                 ? sigma_for_vnr_db(plan.spec, db)
                                 : sigma_for_snr_db(power, db);
        out.push_back(run_point(plan.spec, db, sigma, plan, gi, threads));
    }
    return out;
}

std::vector<SerEstimate> estimate_ser(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records");
    std::vector<SerEstimate> out;
    out.reserve(records.size());
    for (const TrialRecord& r : records) {
        SerEstimate e;
        e.axis_db = r.axis_db;
        e.ser = point_ser(r);
        const Interval ci = wilson95(r.symbol_errors, r.trials * r.coords_per_block);
        e.ci_lo = ci.lo;
        e.ci_hi = ci.hi;
        out.push_back(e);
    }
    return out;
}

std::string results_to_csv(const std::vector<TrialRecord>& records) {
    std::string s = "axis_db,trials,block_errors,bler,bler_ci_lo,bler_ci_hi,ser,runtime_s\n";
    char line[256];
    for (const TrialRecord& r : records) {
        std::snprintf(line, sizeof line, "%.10g,%ld,%ld,%.10g,%.10g,%.10g,%.10g,%.3f\n",
                      r.axis_db, r.trials, r.block_errors, r.bler, r.bler_ci_lo,
                      r.bler_ci_hi, point_ser(r), r.runtime_s);
        s += line;
    }
    return s;
}

std::string results_to_json(const std::vector<TrialRecord>& records) {
    json rows = json::array();
    for (const TrialRecord& r : records) {
        json row{{"axis_db", r.axis_db},
                 {"trials", r.trials},
                 {"block_errors", r.block_errors},
                 {"bler", r.bler},
                 {"bler_ci_lo", r.bler_ci_lo},
                 {"bler_ci_hi", r.bler_ci_hi},
                 {"ser", point_ser(r)},
                 {"runtime_s", r.runtime_s}};
        row["symbol_errors"] = r.symbol_errors;
        row["coords_per_block"] = r.coords_per_block;
        row["first_error_by_level"] = r.first_error_by_level;
        rows.push_back(std::move(row));
    }
    return rows.dump(2) + "\n";
}

ExperimentPlan load_plan(const std::string& path) {
    const json j = json::parse(read_file(path, "plan file"));
    ExperimentPlan plan;
    std::filesystem::path sp(j.at("spec_file").get<std::string>());
    if (sp.is_relative()) sp = std::filesystem::path(path).parent_path() / sp;
    plan.spec = PolarLatticeSpec::from_json(read_file(sp.string(), "spec file"));
    const std::string axis = j.at("axis").get<std::string>();
    if (axis == "vnr_db")
        plan.axis = SweepAxis::VnrDb;
    else if (axis == "snr_db")
        plan.axis = SweepAxis::SnrDb;
    else
        throw std::invalid_argument("axis must be vnr_db or snr_db");
    plan.grid_db = j.at("grid_db").get<std::vector<double>>();
    if (j.contains("min_errors")) plan.min_errors = j["min_errors"].get<long>();
    if (j.contains("max_trials")) plan.max_trials = j["max_trials"].get<long>();
    if (j.contains("master_seed")) plan.master_seed = j["master_seed"].get<std::uint64_t>();
    plan.validate();
    return plan;
}

}  // namespace pl
