/*
Channel models: finite binary-input tables with degrading-merge quantization,
continuous partition-channel densities (symmetric mod-lattice and shaped
asymmetric), their quantized counterparts, and seeded AWGN sampling.
*/

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polarlat/lattice.hpp"

namespace pl {

// Binary-input channel as explicit conditional tables W(y|0), W(y|1).
struct DiscreteBMC {
    std::vector<double> p0, p1;

    std::size_t size() const { return p0.size(); }
    void push(double a, double b) {
        p0.push_back(a);
        p1.push_back(b);
    }
    // Both conditionals sum to 1 +- 1e-12; no output has p0 = p1 = 0.
    void validate() const;
    double capacity() const;       // I(X;Y) in bits, uniform input
    double bhattacharyya() const;  // sum sqrt(p0 p1)
    double error_prob() const;     // ML block-of-one error, uniform input

    static DiscreteBMC bsc(double crossover);
    static DiscreteBMC bec(double erasure);
};

// Greedy pairwise merge of likelihood-ratio-adjacent outputs, minimizing the
// capacity loss of each merge, until at most mu outputs remain. The result is
// degraded with respect to the input channel.
DiscreteBMC degrading_merge(const DiscreteBMC& w, int mu);

// Identity when the table already has <= mu outputs; otherwise degrading_merge.
DiscreteBMC quantize_channel(const DiscreteBMC& fine, int mu);

// Continuous binary-input channel on an interval, described by two densities.
struct ContinuousBMC {
    std::function<double(double)> f0, f1;  // densities of y given x = 0 / 1
    double lo = 0.0, hi = 1.0;             // output support
    int fine_bins = 4096;
};

// Integrates the densities over fine bins (ordered by likelihood ratio via the
// merge step) and degrades down to mu outputs.
DiscreteBMC quantize_channel(const ContinuousBMC& ch, int mu);

// log of the lattice-periodized Gaussian density
// sum_k N(u - k*period; sigma^2), absolute alias tail < 1e-15.
double log_aliased_gaussian(double u, double sigma, double period);

// Density of the level-ell partition channel: observation y_bar in the level-ell
// fundamental region, input bit x_ell, conditioning label bits x_prefix (bits of
// levels 1..ell-1, LSB first). Throws if y_bar is outside the region.
double mod_channel_density(const PartitionChain& chain, int ell, double sigma,
                           const double y_bar[2], int x_ell, unsigned x_prefix);

// ln f(y_bar | x_ell = 0, prefix) - ln f(y_bar | x_ell = 1, prefix) of the same
// channel; y_bar may be any real point (reduced internally).
double mod_channel_llr(const PartitionChain& chain, int ell, double sigma,
                       const double y_bar[2], unsigned x_prefix);

// Level-ell mod channel (prefix 0) quantized to mu outputs.
DiscreteBMC quantize_level_channel(const PartitionChain& chain, int ell, double sigma,
                                   int mu, int fine_bins = 4096);

// Shaped (asymmetric) level channel: input bit ell of a discrete-Gaussian point,
// conditioned on the lower label bits; output is the unreduced AWGN observation.
struct AsymmetricLevelChannel {
    int level = 1;
    unsigned cond_prefix = 0;  // x_{1:ell-1}, LSB first
    double sigma = 1.0;        // channel noise std
    const DiscreteGaussianPmf* pmf = nullptr;

    void validate() const;
    double sigma_s() const { return pmf->spec.sigma_s; }
    double mmse_alpha() const {
        double s2 = sigma_s() * sigma_s();
        return s2 / (s2 + sigma * sigma);
    }
    double sigma_tilde() const { return std::sqrt(mmse_alpha()) * sigma; }
    double prior0() const { return pmf->level_bit_prob(level, cond_prefix, 0); }
};

// f(y | x_ell, prefix): alias sum over the coset points of the prior, evaluated
// through the MMSE-rescaled exponent exp(-(alpha y - a)^2 / (2 sigma_tilde^2))
// with the common prefactor applied once.
double asymmetric_density(const AsymmetricLevelChannel& ch, double y, int x_ell);

// Posterior log-ratio ln P(x_ell=0 | y, prefix) / P(x_ell=1 | y, prefix) as a
// function of the rescaled observation alpha*y: the prior is absorbed into the
// coset sums, so the same evaluator serves prior-weighted decoding directly.
double shaped_level_llr(const DiscreteGaussianPmf& pmf, int ell, unsigned prefix,
                        double alpha_y, double sigma_tilde);

// Symmetrized level-ell shaped channel: uniform input x~, output (y bin, prefix
// c, d = x_ell xor x~); quantized to mu outputs. Used for z_channel evolution.
DiscreteBMC quantize_shaped_level_channel(const DiscreteGaussianPmf& pmf, int ell,
                                          double sigma, int mu, int fine_bins = 2048);

// Symmetrized source-only channel at level ell: output (c, d), no observation.
// Used for z_source evolution.
DiscreteBMC shaped_source_channel(const DiscreteGaussianPmf& pmf, int ell);

struct DegradeWitness {
    bool ok = false;
    std::string detail;
};

// Necessary degradation consequences: I(coarse) <= I(fine) and
// Z(coarse) >= Z(fine), with a small numerical slack.
DegradeWitness degrade_check(const DiscreteBMC& coarse, const DiscreteBMC& fine);

// Builds the intermediate kernel that realizes the level-ell channel from the
// level-(ell+1) channel at equal sigma and returns the max pointwise density
// mismatch between the concatenation and the direct level-ell density on a grid.
double verify_chain_degradation(const PartitionChain& chain, int ell, double sigma,
                                int grid = 64);

struct NoiseModel {
    double sigma = 1.0;
    std::uint64_t seed = 0;
    void validate() const;
};

// i.i.d. N(0, sigma^2) stream; identical seed => identical vector.
std::vector<double> awgn_sample(const NoiseModel& nm, std::size_t len);

}  // namespace pl
