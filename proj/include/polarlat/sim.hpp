/*
Seeded Monte Carlo experiments: sweep a dB grid (VNR for unshaped designs, SNR
for shaped ones), transmit random messages over AWGN at the axis-implied noise,
multistage-decode, and count block and coordinate errors until a stop rule
fires. Records carry Wilson 95% confidence intervals and serialize to CSV and
JSON with fixed columns.

Per-trial randomness is keyed by (master_seed, grid index, trial index), so any
schedule over a worker pool reproduces the serial counts bit for bit.
*/

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarlat/codec.hpp"

namespace pl {

enum class SweepAxis { VnrDb, SnrDb };

struct ExperimentPlan {
    PolarLatticeSpec spec;
    SweepAxis axis = SweepAxis::VnrDb;
    std::vector<double> grid_db;  // strictly increasing
    long min_errors = 100;        // stop after this many block errors...
    long max_trials = 1000000;    // ...or this many trials, whichever first
    std::uint64_t master_seed = 1;

    void validate() const;
};

struct TrialRecord {
    double axis_db = 0.0;
    long trials = 0;
    long block_errors = 0;   // decoded lattice point differs from the sent one
    long symbol_errors = 0;  // differing coordinates, summed over bad blocks
    long coords_per_block = 0;  // n*N, the per-trial SER denominator
    std::vector<long> first_error_by_level;  // levels 1..r, then uncoded remainder
    double runtime_s = 0.0;
    double bler = 0.0, bler_ci_lo = 0.0, bler_ci_hi = 0.0;  // Wilson 95%
};

struct Interval {
    double lo = 0.0, hi = 1.0;
};

// Wilson score interval at 95% for `errors` events in `trials` draws.
Interval wilson95(long errors, long trials);

// Runs the sweep; one record per grid point, reproducible from the plan alone.
// `threads` caps the worker pool; any value gives identical records.
std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, int threads = 1);

struct SerEstimate {
    double axis_db = 0.0, ser = 0.0, ci_lo = 0.0, ci_hi = 0.0;
};

// Per-point coordinate error rate, symbol_errors / (trials * coords_per_block),
// with Wilson 95% CI. Throws std::invalid_argument on an empty record list.
std::vector<SerEstimate> estimate_ser(const std::vector<TrialRecord>& records);

// One row per grid point:
// axis_db,trials,block_errors,bler,bler_ci_lo,bler_ci_hi,ser,runtime_s
std::string results_to_csv(const std::vector<TrialRecord>& records);

// Same rows as JSON objects, plus symbol_errors, coords_per_block, and
// first_error_by_level diagnostics.
std::string results_to_json(const std::vector<TrialRecord>& records);

// Plan file: JSON object with keys spec_file, axis ("vnr_db" | "snr_db"),
// grid_db, and optional min_errors, max_trials, master_seed. A relative
// spec_file resolves against the plan file's directory. Missing files throw
// std::runtime_error.
ExperimentPlan load_plan(const std::string& path);

}  // namespace pl
