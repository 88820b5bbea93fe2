/*
Multilevel codec: natural-order polar transform, construction-D encoding over a
partition chain, discrete-Gaussian shaped encoding, and multistage successive
cancellation decoding (symmetric and shaped).

Message bits are packed level-major: level 1's info positions in ascending
index order, then level 2's, and so on. Frozen bits and shaping randomness are
derived from the spec seed, so encoding is a pure function of (spec, message).
*/

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polarlat/construction.hpp"

namespace pl {

struct PolarLatticeSpec {
    int n = 1;               // symbol dimension (1 or 2)
    int r = 1;               // coded levels
    int N = 1;               // block length (symbols)
    double sigma = 0.1;      // design noise std
    bool shaped = false;
    double sigma_s = 0.0;    // shaping std (shaped mode only)
    int support_radius = 0;  // shaping truncation radius (shaped mode only)
    std::uint64_t seed = 0;  // frozen-bit and shaping randomness seed
    std::vector<LevelCodeSpec> levels;  // levels[ell-1] describes level ell

    PartitionChain chain() const { return {n, r}; }
    int message_bits() const;
    void validate() const;
    std::string to_json() const;
    static PolarLatticeSpec from_json(const std::string& text);
};

// In-place natural-order polar transform u := u G, G = [[1,0],[1,1]]^{(x) m}.
void polar_encode_inplace(std::vector<std::uint8_t>& u);

// Check-node and variable-node LLR combiners (exact, numerically stable).
double llr_combine(double a, double b);
double llr_extend(double a, double b, int x_left);

// Successive cancellation over parallel leaf-LLR tracks (at most two) sharing
// one decision sequence. decide(i, l) sees the per-track LLRs at leaf i in
// natural order and returns the bit; decisions land in u and the returned
// vector is the codeword u G. The track vectors are consumed as scratch.
std::vector<std::uint8_t> sc_run(std::vector<std::vector<double>>& tracks,
                                 const std::function<std::uint8_t(int, const double*)>& decide,
                                 std::vector<std::uint8_t>& u);

struct Codeword {
    LatticePoint x;                            // n*N coordinates
    std::vector<std::vector<std::uint8_t>> u;  // per-level pre-transform bits
    std::vector<unsigned> residue;             // per-symbol label, bits LSB first
};

// Construction-D encode: per level, info positions take message bits and frozen
// positions take seeded bits; the label of each symbol is the sum of coset
// representatives. `top` (n*N coords), if given, must lie in the depth-r
// lattice and is added verbatim.
Codeword encode_construction_d(const PolarLatticeSpec& spec,
                               const std::vector<std::uint8_t>& message,
                               const LatticePoint* top = nullptr);

// Shaped encode (1-D chains): a forward pass per level on the exact source
// conditionals; shaping positions are drawn from their posterior with
// seed-keyed randomness, and the transmitted point is drawn from the discrete
// Gaussian restricted to the encoded residue class.
Codeword encode_shaped(const PolarLatticeSpec& spec, const std::vector<std::uint8_t>& message);

struct DecodeResult {
    std::vector<std::uint8_t> message;         // decoded info bits, level-major
    LatticePoint x;                            // reconstructed point
    std::vector<std::vector<std::uint8_t>> u;  // per-level decisions
};

// Multistage SC decoding, level 1 upward, with exact continuous level
// densities; the uncoded remainder is decoded by coordinatewise rounding.
// In shaped mode the observation is MMSE-rescaled once up front and shaping
// decisions are reproduced from the decoded prefix.
DecodeResult multistage_decode(const PolarLatticeSpec& spec, const LatticePoint& y,
                               double sigma);

}  // namespace pl
