/*
Polar construction: transform-pair evolution of quantized channel tables,
frozen/information/shaping set selection, and nesting certification.

Index convention: subchannel i of N = 2^m follows the natural order of the
[[1,0],[1,1]] Kronecker power without bit reversal; the transform path of
index i is its binary expansion MSB first, 0 = combine (minus), 1 = split (plus).
*/

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polarlat/channel.hpp"

namespace pl {

struct LevelCodeSpec {
    int N = 0;
    int level = 1;
    std::vector<int> frozen, info, shaping;  // sorted, disjoint, cover [0, N)
    std::vector<double> z_channel;           // Z(U_i | U^{1:i-1}, Y, side info)
    std::vector<double> z_source;            // Z(U_i | U^{1:i-1}); 1.0 when uniform

    double rate() const { return N ? static_cast<double>(info.size()) / N : 0.0; }
    double info_z_sum() const;
    void validate() const;
};

struct NestingCertificate {
    std::vector<int> levels;    // level tags in the order checked
    std::vector<bool> pair_ok;  // info(l) subset of info(l+1), per adjacent pair
    bool valid = true;
    int first_bad = -1;         // pair index of the first violation, -1 if none
};

// One combining/splitting step; both outputs re-quantized to mu symbols.
std::pair<DiscreteBMC, DiscreteBMC> polar_transform_pair(const DiscreteBMC& w, int mu);

// Bhattacharyya parameters of all N subchannels, natural order. When pe_out
// is given, it receives each subchannel's exact single-use error probability.
std::vector<double> evolve_subchannels(const DiscreteBMC& w, int N, int mu = 128,
                                       std::vector<double>* pe_out = nullptr);

// Ascending-Z greedy prefix with certified sum bound: info indices carry
// total Z at most target_pe. Symmetric design (no shaping set).
LevelCodeSpec select_sets_equal_error(const std::vector<double>& z_channel, double target_pe);

// Same ascending-Z prefix, but the budget is charged against each index's
// error probability instead of its Z upper bound. Indices in `require` are
// forced in first (and charged), so stacked designs can keep lower-level
// info sets nested inside higher ones.
LevelCodeSpec select_sets_equal_error(const std::vector<double>& z_channel,
                                      const std::vector<double>& pe_channel,
                                      double target_pe,
                                      const std::vector<int>& require = {});

// Threshold rule: info = {i : z <= threshold}.
LevelCodeSpec select_sets_capacity(const std::vector<double>& z_channel, double threshold);

// Three-way rule for shaped levels: frozen where the channel is useless,
// informational where the channel is clean and the source is uniform,
// shaping elsewhere.
LevelCodeSpec select_sets_asymmetric(const std::vector<double>& z_channel,
                                     const std::vector<double>& z_source, double threshold);

// 2^(-N^0.45) clipped to [1e-9, 0.5].
double default_selection_threshold(int N);

NestingCertificate certify_nesting(const std::vector<LevelCodeSpec>& specs);

}  // namespace pl
