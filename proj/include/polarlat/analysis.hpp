/*
Capacity numerics and design accounting: mod-lattice channel capacities by
adaptive quadrature, per-level partition capacities, shaped-level mutual
information by Monte Carlo, union bounds on block error, axis conversions,
and long-form CSV curves.
*/

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarlat/codec.hpp"

namespace pl {

// Capacity in bits per n-dim symbol of the mod-lattice channel at chain depth
// k (k = 0..r): log2 V(Lambda_k) minus the entropy of the aliased Gaussian
// over a fundamental region. The 2-D lattices factor into two per-coordinate
// 1-D integrals in the rotated frame, so both chains reduce to 1-D quadrature.
double capacity_mod_lattice(const PartitionChain& chain, int depth, double sigma);

// Capacity of the binary level-ell partition channel,
// C(depth ell) - C(depth ell-1); lies in [0, 1].
double capacity_partition_level(const PartitionChain& chain, int ell, double sigma);

// Design-gap accounting: the per-dimension log-VNR gap to 2*pi*e decomposes
// into the top-lattice mod capacity (eps1), a nonnegative bottom-lattice term
// that is bounded and dropped (eps2), and the total rate shortfall of the
// component codes (eps3).
struct GapReport {
    double eps1 = 0.0;
    double eps2_bound = 0.0;              // bounded >= 0, never computed
    double eps3 = 0.0;
    double log_vnr_gap_bits = 0.0;        // (2/n) (eps1 + eps3)
    double gap_db = 0.0;                  // gap bits scaled by 10 log10 2
    bool capacity_rule_violated = false;  // a level's rate exceeds its capacity
};

// Pure gap arithmetic from given epsilon terms (n = symbol dimension).
GapReport gap_from_eps(int n, double eps1, double eps3);

// eps1 and eps3 evaluated from the spec's chain and per-level rates at the
// given effective noise std.
GapReport gap_report(const PolarLatticeSpec& spec, double sigma_tilde);

struct MiEstimate {
    double value = 0.0;  // bits
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// I(Y; X_ell | X_{1:ell-1}) for the level-ell label bit of a discrete-Gaussian
// input over AWGN, estimated by Monte Carlo over the source distribution with
// antithetic noise pairs.
MiEstimate level_mutual_info_shaped(double sigma_s, double sigma, int ell,
                                    std::uint64_t samples = 1000000,
                                    std::uint64_t seed = 1);

// I(Y; X_{1:levels}) under the same model; chain-rule oracle for the sum of
// the per-level estimates.
MiEstimate joint_mutual_info_shaped(double sigma_s, double sigma, int levels,
                                    std::uint64_t samples = 1000000,
                                    std::uint64_t seed = 1);

// Union bound on block error under multistage decoding: per-level info-set
// Bhattacharyya sums plus the boundary term N * P(noise leaves the Voronoi
// region of the depth-r lattice). Requires populated z_channel tables.
double union_bound_pe(const PolarLatticeSpec& spec);

// Long-form curve data; one value per (axis point, level).
struct CapacityCurve {
    std::vector<double> axis;                 // sigma, or SNR in dB
    std::vector<std::vector<double>> values;  // values[point][level-1]
    std::string to_csv() const;               // columns sigma_or_snr,level,value
};

CapacityCurve partition_capacity_curve(const PartitionChain& chain,
                                       const std::vector<double>& sigma_grid);

CapacityCurve shaped_mi_curve(double sigma_s, const std::vector<double>& snr_db_grid,
                              int levels, std::uint64_t samples = 200000,
                              std::uint64_t seed = 1);

// Per-dimension log2 normalized volume of the construction-D lattice,
// (2/n) (r - sum of level rates).
double log2_norm_volume(const PolarLatticeSpec& spec);

// VNR in dB relative to 2*pi*e, 10 log10(V^{2/n} / (2 pi e sigma^2)), and its
// inverse on sigma.
double vnr_db(const PolarLatticeSpec& spec, double sigma);
double sigma_for_vnr_db(const PolarLatticeSpec& spec, double v_db);

// SNR in dB at a given signal power, 10 log10(power / sigma^2), and its
// inverse on sigma.
double snr_db_for_sigma(double power, double sigma);
double sigma_for_snr_db(double power, double snr_db);

}  // namespace pl
