/*
Multilevel encoder/decoder over partition chains: polar transform, SC engine
with parallel LLR tracks, construction-D and shaped encoding, multistage
decoding, and spec (de)serialization.
*/

#include "polarlat/codec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "polarlat/rng.hpp"

namespace pl {

namespace {

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Per-index class lookup: 0 frozen, 1 info, 2 shaping.
std::vector<std::uint8_t> index_classes(const LevelCodeSpec& lv) {
    std::vector<std::uint8_t> cls(lv.N, 0);
    for (int i : lv.info) cls[i] = 1;
    for (int i : lv.shaping) cls[i] = 2;
    return cls;
}

std::uint8_t frozen_bit(std::uint64_t seed, int level, int i) {
    return static_cast<std::uint8_t>(prf_bit(mix3(seed, 0xF100u + level, i)));
}

// Rolling decision hash driving shaping draws; encoder and decoder keep it in
// lockstep by absorbing every decided bit in leaf order.
struct ShapeStream {
    std::uint64_t h;
    explicit ShapeStream(std::uint64_t seed) : h(mix2(seed, 0x73686170ULL)) {}
    void absorb(int bit) { h = splitmix64(h ^ static_cast<std::uint64_t>(2 * bit + 1)); }
    std::uint8_t draw(int level, int i, double src_llr) const {
        double p1 = 1.0 / (1.0 + std::exp(src_llr));
        return prf_uniform(mix3(h, level, i)) < p1 ? 1 : 0;
    }
};

// Inverse-CDF draw from the discrete Gaussian restricted to a residue class.
int draw_coset_point(const DiscreteGaussianPmf& pmf, unsigned res, int r, double v01) {
    const int m = 1 << r;
    const double total = pmf.coset_mass(r, res);
    double acc = 0.0;
    int last = pmf.lo;
    for (int lam = pmf.lo; lam <= pmf.hi(); ++lam) {
        if (((lam % m) + m) % m != static_cast<int>(res)) continue;
        acc += pmf.prob(lam);
        last = lam;
        if (acc >= v01 * total) return lam;
    }
    return last;
}

struct ScEngine {
    int n_tracks;
    std::vector<std::vector<double>> arena;
    std::vector<std::uint8_t> bits;
    const std::function<std::uint8_t(int, const double*)>* decide;
    std::vector<std::uint8_t>* u;

    void rec(int n, int base, double* const* L, int off, int boff, std::uint8_t* xout) {
        if (n == 1) {
            double vals[2] = {L[0][0], n_tracks > 1 ? L[1][0] : 0.0};
            std::uint8_t b = (*decide)(base, vals);
            (*u)[base] = b;
            xout[0] = b;
            return;
        }
        const int h = n / 2;
        double* lc[2] = {nullptr, nullptr};
        for (int t = 0; t < n_tracks; ++t) {
            lc[t] = arena[t].data() + off;
            for (int j = 0; j < h; ++j) lc[t][j] = llr_combine(L[t][j], L[t][j + h]);
        }
        std::uint8_t* xl = bits.data() + boff;
        rec(h, base, lc, off + h, boff + h, xl);
        for (int t = 0; t < n_tracks; ++t)
            for (int j = 0; j < h; ++j) lc[t][j] = llr_extend(L[t][j], L[t][j + h], xl[j]);
        rec(h, base + h, lc, off + h, boff + h, xout + h);
        for (int j = 0; j < h; ++j) xout[j] = xl[j] ^ xout[j + h];
    }
};

}  // namespace

double llr_combine(double a, double b) {
    double s = std::copysign(1.0, a) * std::copysign(1.0, b) * std::min(std::abs(a), std::abs(b));
    return s + std::log1p(std::exp(-std::abs(a + b))) - std::log1p(std::exp(-std::abs(a - b)));
}

double llr_extend(double a, double b, int x_left) { return x_left ? b - a : b + a; }

void polar_encode_inplace(std::vector<std::uint8_t>& u) {
    const int n = static_cast<int>(u.size());
    if (!power_of_two(n)) throw std::invalid_argument("block length must be a power of two");
    for (int len = 1; len < n; len <<= 1)
        for (int i = 0; i < n; i += 2 * len)
            for (int j = 0; j < len; ++j) u[i + j] ^= u[i + j + len];
}

std::vector<std::uint8_t> sc_run(std::vector<std::vector<double>>& tracks,
                                 const std::function<std::uint8_t(int, const double*)>& decide,
                                 std::vector<std::uint8_t>& u) {
    if (tracks.empty() || tracks.size() > 2) throw std::invalid_argument("one or two LLR tracks");
    const int n = static_cast<int>(tracks[0].size());
    if (!power_of_two(n)) throw std::invalid_argument("block length must be a power of two");
    for (const auto& t : tracks)
        if (static_cast<int>(t.size()) != n) throw std::invalid_argument("track length mismatch");

    ScEngine eng;
    eng.n_tracks = static_cast<int>(tracks.size());
    eng.arena.resize(eng.n_tracks);
    for (auto& a : eng.arena) a.resize(n);
    eng.bits.resize(n);
    eng.decide = &decide;
    u.assign(n, 0);
    eng.u = &u;

    std::vector<std::uint8_t> x(n);
    double* roots[2] = {tracks[0].data(), tracks.size() > 1 ? tracks[1].data() : nullptr};
    eng.rec(n, 0, roots, 0, 0, x.data());
    return x;
}

int PolarLatticeSpec::message_bits() const {
    int k = 0;
    for (const auto& lv : levels) k += static_cast<int>(lv.info.size());
    return k;
}

void PolarLatticeSpec::validate() const {
    chain().validate();
    if (!power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    if (static_cast<int>(levels.size()) != r)
        throw std::invalid_argument("spec needs one level code per chain level");
    for (int i = 0; i < r; ++i) {
        const auto& lv = levels[i];
        lv.validate();
        if (lv.N != N) throw std::invalid_argument("level block length mismatch");
        if (lv.level != i + 1) throw std::invalid_argument("level tags must be 1..r in order");
        if (!shaped && !lv.shaping.empty())
            throw std::invalid_argument("shaping sets require shaped mode");
    }
    if (shaped) {
        if (n != 1) throw std::invalid_argument("shaped mode supports 1-D chains only");
        if (!(sigma_s > 0)) throw std::invalid_argument("sigma_s must be positive in shaped mode");
    }
}

Codeword encode_construction_d(const PolarLatticeSpec& spec,
                               const std::vector<std::uint8_t>& message,
                               const LatticePoint* top) {
    spec.validate();
    if (spec.shaped) throw std::invalid_argument("shaped specs use encode_shaped");
    if (static_cast<int>(message.size()) != spec.message_bits())
        throw std::invalid_argument("message length mismatch");
    const PartitionChain ch = spec.chain();
    const int nn = spec.n * spec.N;

    Codeword cw;
    cw.x.assign(nn, 0.0);
    cw.residue.assign(spec.N, 0);
    std::size_t cursor = 0;
    for (int ell = 1; ell <= spec.r; ++ell) {
        const auto& lv = spec.levels[ell - 1];
        std::vector<std::uint8_t> u(spec.N, 0);
        for (int i : lv.info) u[i] = message[cursor++];
        for (int i : lv.frozen) u[i] = frozen_bit(spec.seed, ell, i);
        cw.u.push_back(u);
        polar_encode_inplace(u);
        double g[2];
        ch.coset_rep(ell, g);
        for (int j = 0; j < spec.N; ++j)
            if (u[j]) {
                cw.residue[j] |= 1u << (ell - 1);
                for (int d = 0; d < spec.n; ++d) cw.x[spec.n * j + d] += g[d];
            }
    }
    if (top) {
        if (static_cast<int>(top->size()) != nn) throw std::invalid_argument("top point length");
        for (int j = 0; j < spec.N; ++j) {
            double t[2] = {(*top)[spec.n * j], spec.n == 2 ? (*top)[spec.n * j + 1] : 0.0};
            double rt[2] = {t[0], t[1]};
            ch.round_symbol(rt, spec.r);
            for (int d = 0; d < spec.n; ++d)
                if (std::abs(rt[d] - t[d]) > 1e-9)
                    throw std::invalid_argument("top point is not in the depth-r lattice");
            for (int d = 0; d < spec.n; ++d) cw.x[spec.n * j + d] += t[d];
        }
    }
    return cw;
}

Codeword encode_shaped(const PolarLatticeSpec& spec, const std::vector<std::uint8_t>& message) {
    spec.validate();
    if (!spec.shaped) throw std::invalid_argument("unshaped specs use encode_construction_d");
    if (static_cast<int>(message.size()) != spec.message_bits())
        throw std::invalid_argument("message length mismatch");
    DiscreteGaussianSpec gs{spec.sigma_s, spec.r, spec.support_radius};
    const DiscreteGaussianPmf pmf = discrete_gaussian_pmf(gs);

    Codeword cw;
    cw.x.assign(spec.N, 0.0);
    cw.residue.assign(spec.N, 0);
    ShapeStream hs(spec.seed);
    std::size_t cursor = 0;
    for (int ell = 1; ell <= spec.r; ++ell) {
        const auto& lv = spec.levels[ell - 1];
        const auto cls = index_classes(lv);
        std::vector<std::vector<double>> tracks(1, std::vector<double>(spec.N));
        for (int j = 0; j < spec.N; ++j) tracks[0][j] = pmf.prior_llr(ell, cw.residue[j]);
        auto decide = [&](int i, const double* l) -> std::uint8_t {
            std::uint8_t b;
            if (cls[i] == 1)
                b = message[cursor++];
            else if (cls[i] == 0)
                b = frozen_bit(spec.seed, ell, i);
            else
                b = hs.draw(ell, i, l[0]);
            hs.absorb(b);
            return b;
        };
        std::vector<std::uint8_t> u;
        auto xbits = sc_run(tracks, decide, u);
        cw.u.push_back(u);
        for (int j = 0; j < spec.N; ++j)
            if (xbits[j]) cw.residue[j] |= 1u << (ell - 1);
    }
    for (int j = 0; j < spec.N; ++j) {
        double v = prf_uniform(mix3(hs.h, 0x746F70ULL, j));
        cw.x[j] = draw_coset_point(pmf, cw.residue[j], spec.r, v);
    }
    return cw;
}

namespace {

DecodeResult decode_symmetric(const PolarLatticeSpec& spec, const LatticePoint& y, double sigma) {
    const PartitionChain ch = spec.chain();
    DecodeResult out;
    std::vector<unsigned> res(spec.N, 0);
    std::vector<double> off(spec.n * spec.N, 0.0);
    for (int ell = 1; ell <= spec.r; ++ell) {
        const auto& lv = spec.levels[ell - 1];
        const auto cls = index_classes(lv);
        std::vector<std::vector<double>> tracks(1, std::vector<double>(spec.N));
        for (int j = 0; j < spec.N; ++j) {
            double yb[2] = {y[spec.n * j], spec.n == 2 ? y[spec.n * j + 1] : 0.0};
            tracks[0][j] = mod_channel_llr(ch, ell, sigma, yb, res[j]);
        }
        auto decide = [&](int i, const double* l) -> std::uint8_t {
            if (cls[i] == 0) return frozen_bit(spec.seed, ell, i);
            return l[0] < 0.0 ? 1 : 0;
        };
        std::vector<std::uint8_t> u;
        auto xbits = sc_run(tracks, decide, u);
        for (int i : lv.info) out.message.push_back(u[i]);
        out.u.push_back(std::move(u));
        double g[2];
        ch.coset_rep(ell, g);
        for (int j = 0; j < spec.N; ++j)
            if (xbits[j]) {
                res[j] |= 1u << (ell - 1);
                for (int d = 0; d < spec.n; ++d) off[spec.n * j + d] += g[d];
            }
    }
    out.x.assign(spec.n * spec.N, 0.0);
    for (int j = 0; j < spec.N; ++j) {
        double t[2] = {y[spec.n * j] - off[spec.n * j],
                       spec.n == 2 ? y[spec.n * j + 1] - off[spec.n * j + 1] : 0.0};
        ch.round_symbol(t, spec.r);
        for (int d = 0; d < spec.n; ++d) out.x[spec.n * j + d] = off[spec.n * j + d] + t[d];
    }
    return out;
}

DecodeResult decode_shaped(const PolarLatticeSpec& spec, const LatticePoint& y, double sigma) {
    DiscreteGaussianSpec gs{spec.sigma_s, spec.r, spec.support_radius};
    const DiscreteGaussianPmf pmf = discrete_gaussian_pmf(gs);
    const double s2 = spec.sigma_s * spec.sigma_s;
    const double alpha = s2 / (s2 + sigma * sigma);
    const double st = std::sqrt(alpha) * sigma;

    DecodeResult out;
    std::vector<unsigned> res(spec.N, 0);
    std::vector<double> ay(spec.N);
    for (int j = 0; j < spec.N; ++j) ay[j] = alpha * y[j];

    ShapeStream hs(spec.seed);
    for (int ell = 1; ell <= spec.r; ++ell) {
        const auto& lv = spec.levels[ell - 1];
        const auto cls = index_classes(lv);
        std::vector<std::vector<double>> tracks(2, std::vector<double>(spec.N));
        for (int j = 0; j < spec.N; ++j) {
            tracks[0][j] = shaped_level_llr(pmf, ell, res[j], ay[j], st);
            tracks[1][j] = pmf.prior_llr(ell, res[j]);
        }
        auto decide = [&](int i, const double* l) -> std::uint8_t {
            std::uint8_t b;
            if (cls[i] == 1)
                b = l[0] < 0.0 ? 1 : 0;
            else if (cls[i] == 0)
                b = frozen_bit(spec.seed, ell, i);
            else
                b = hs.draw(ell, i, l[1]);
            hs.absorb(b);
            return b;
        };
        std::vector<std::uint8_t> u;
        auto xbits = sc_run(tracks, decide, u);
        for (int i : lv.info) out.message.push_back(u[i]);
        out.u.push_back(std::move(u));
        for (int j = 0; j < spec.N; ++j)
            if (xbits[j]) res[j] |= 1u << (ell - 1);
    }
    out.x.assign(spec.N, 0.0);
    const double vol = std::pow(2.0, spec.r);
    for (int j = 0; j < spec.N; ++j) {
        // Points are integers; snap away the float dust of the rescaling.
        double lam = ay[j] - mod_half_open(ay[j] - static_cast<double>(res[j]), vol);
        out.x[j] = static_cast<double>(std::llround(lam));
    }
    return out;
}

}  // namespace

DecodeResult multistage_decode(const PolarLatticeSpec& spec, const LatticePoint& y,
                               double sigma) {
    spec.validate();
    if (static_cast<int>(y.size()) != spec.n * spec.N)
        throw std::invalid_argument("observation length mismatch");
    if (!(sigma > 0)) throw std::invalid_argument("decoder sigma must be positive");
    return spec.shaped ? decode_shaped(spec, y, sigma) : decode_symmetric(spec, y, sigma);
}

using json = nlohmann::ordered_json;

namespace {

json level_to_json(const LevelCodeSpec& lv) {
    return json{{"N", lv.N},          {"level", lv.level},
                {"frozen", lv.frozen}, {"info", lv.info},
                {"shaping", lv.shaping}, {"z_channel", lv.z_channel},
                {"z_source", lv.z_source}};
}

LevelCodeSpec level_from_json(const json& j) {
    LevelCodeSpec lv;
    lv.N = j.at("N").get<int>();
    lv.level = j.at("level").get<int>();
    lv.frozen = j.at("frozen").get<std::vector<int>>();
    lv.info = j.at("info").get<std::vector<int>>();
    lv.shaping = j.at("shaping").get<std::vector<int>>();
    lv.z_channel = j.at("z_channel").get<std::vector<double>>();
    lv.z_source = j.at("z_source").get<std::vector<double>>();
    return lv;
}

}  // namespace

std::string PolarLatticeSpec::to_json() const {
    json j{{"n", n},           {"r", r},
           {"N", N},           {"sigma", sigma},
           {"shaped", shaped}, {"sigma_s", sigma_s},
           {"support_radius", support_radius}, {"seed", seed}};
    j["levels"] = json::array();
    for (const auto& lv : levels) j["levels"].push_back(level_to_json(lv));
    return j.dump(2) + "\n";
}

PolarLatticeSpec PolarLatticeSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec parse error: ") + e.what());
    }
    PolarLatticeSpec s;
    try {
        s.n = j.at("n").get<int>();
        s.r = j.at("r").get<int>();
        s.N = j.at("N").get<int>();
        s.sigma = j.at("sigma").get<double>();
        s.shaped = j.at("shaped").get<bool>();
        s.sigma_s = j.at("sigma_s").get<double>();
        s.support_radius = j.at("support_radius").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& lj : j.at("levels")) s.levels.push_back(level_from_json(lj));
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec field error: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace pl
