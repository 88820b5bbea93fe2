/*
Command workflows shared by the command-line tool and the C API: construct a
design from a config document, emit capacity/MI curves, run a simulation plan,
and decode a single block from a file. Commands read and write files under a
caller-chosen directory and return a human-readable summary.

Error conventions: std::invalid_argument for bad configs or arguments (usage),
std::runtime_error for missing or unreadable files, NumericError when a design
fails a numerical soundness check (e.g. the shaping flatness gate).
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarlat/codec.hpp"

namespace pl {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstructConfig {
    int n = 1;  // chain dimension: config key "chain" is "z" (1-D) or "z2" (2-D)
    int r = 2;
    int N = 1024;
    std::string rule = "equal_error";  // or "capacity"
    double target_pe = 1e-5;           // equal_error: total budget, split r+1 ways
    double threshold = 0.0;            // capacity rule; <= 0 uses the N default
    int mu = 128;
    std::uint64_t seed = 1;
    bool shaped = false;
    double sigma = 0.0;    // unshaped design noise
    double sigma_s = 0.0;  // shaped: shaping deviation...
    double snr_db = 0.0;   // ...and design SNR, which fixes the channel noise
};

// Parses the construct config JSON document; unknown "chain"/"rule" values
// raise std::invalid_argument listing the accepted names.
ConstructConfig parse_construct_config(const std::string& json_text);

// Runs the full construction pipeline: per-level channel quantization, density
// evolution, and index selection under the configured rule. Shaped designs
// derive the channel noise from (sigma_s, snr_db) and refuse (NumericError)
// shaping deviations whose top-lattice flatness factor exceeds 0.01.
PolarLatticeSpec design_spec(const ConstructConfig& cfg);

// Per-level rates and set sizes, sum rate, union bound, nesting certificate,
// and (unshaped) the gap report at the design noise; shaped designs report the
// shaping power, SNR, and flatness factor instead.
std::string construct_summary(const PolarLatticeSpec& spec);

struct CapacityConfig {
    bool shaped = false;
    int n = 1;  // unshaped: chain and sigma grid
    int r = 1;
    std::vector<double> sigma_grid;
    double sigma_s = 0.0;  // shaped: MI curves over an SNR grid
    std::vector<double> snr_grid;
    int levels = 1;
    long samples = 200000;
    std::uint64_t seed = 1;
};

CapacityConfig parse_capacity_config(const std::string& json_text);

// construct: writes <out_dir>/spec.json, returns the summary. seed_override
// replaces the config seed when >= 0.
std::string cmd_construct(const std::string& config_path, const std::string& out_dir,
                          std::int64_t seed_override = -1);

// capacity: writes <out_dir>/capacity.csv (sigma_or_snr,level,value rows).
std::string cmd_capacity(const std::string& config_path, const std::string& out_dir);

// simulate: runs the plan, writes <out_dir>/results.csv and results.json.
std::string cmd_simulate(const std::string& plan_path, const std::string& out_dir,
                         int threads = 1);

// decode: reads whitespace-separated coordinates (n*N of them) from y_path,
// decodes at `sigma` (or the spec's design noise when sigma <= 0), writes
// <out_dir>/decoded.json with the message bits and the reconstructed point.
std::string cmd_decode(const std::string& spec_path, const std::string& y_path,
                       double sigma, const std::string& out_dir);

}  // namespace pl
