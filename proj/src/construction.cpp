/*
Polar construction implementation.
*/

#include "polarlat/construction.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pl {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_sorted_disjoint_cover(const LevelCodeSpec& s) {
    std::vector<int> seen(s.N, 0);
    auto mark = [&](const std::vector<int>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            int x = v[i];
            if (x < 0 || x >= s.N) throw std::invalid_argument("set index out of range");
            if (i > 0 && v[i - 1] >= x) throw std::invalid_argument("set not strictly sorted");
            if (seen[x]++) throw std::invalid_argument("sets overlap");
        }
    };
    mark(s.frozen);
    mark(s.info);
    mark(s.shaping);
    for (int x : seen)
        if (!x) throw std::invalid_argument("sets do not cover all indices");
}

}  // namespace

double LevelCodeSpec::info_z_sum() const {
    long double s = 0.0;
    for (int i : info) s += z_channel[i];
    return static_cast<double>(s);
}

void LevelCodeSpec::validate() const {
    if (!power_of_two(N)) throw std::invalid_argument("block length must be a power of 2");
    if (level < 1) throw std::invalid_argument("level must be >= 1");
    if (z_channel.size() != static_cast<std::size_t>(N) ||
        z_source.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("z vectors must have length N");
    for (double z : z_channel)
        if (!(z >= 0.0) || z > 1.0 + 1e-9) throw std::invalid_argument("z_channel out of [0,1]");
    for (double z : z_source)
        if (!(z >= 0.0) || z > 1.0 + 1e-9) throw std::invalid_argument("z_source out of [0,1]");
    check_sorted_disjoint_cover(*this);
}

std::pair<DiscreteBMC, DiscreteBMC> polar_transform_pair(const DiscreteBMC& w, int mu) {
    w.validate();
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");
    const std::size_t k = w.size();
    const auto& a = w.p0;
    const auto& b = w.p1;

    // Combined channel: output pairs (y1, y2); (i, j) and (j, i) have identical
    // conditionals, so keep i <= j with doubled mass.
    DiscreteBMC minus;
    minus.p0.reserve(k * (k + 1) / 2);
    minus.p1.reserve(k * (k + 1) / 2);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double mult = (i == j) ? 0.5 : 1.0;
            double q0 = mult * (a[i] * a[j] + b[i] * b[j]);
            double q1 = mult * (b[i] * a[j] + a[i] * b[j]);
            if (q0 > 0 || q1 > 0) minus.push(q0, q1);
        }
    }

    // Split channel: output (y1, y2, u1). The u1 = 0 block is symmetric in
    // (y1, y2) as well; the u1 = 1 block is not.
    DiscreteBMC plus;
    plus.p0.reserve(k * (k + 1) / 2 + k * k);
    plus.p1.reserve(k * (k + 1) / 2 + k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double mult = (i == j) ? 0.5 : 1.0;
            double q0 = mult * a[i] * a[j];
            double q1 = mult * b[i] * b[j];
            if (q0 > 0 || q1 > 0) plus.push(q0, q1);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double q0 = 0.5 * b[i] * a[j];
            double q1 = 0.5 * a[i] * b[j];
            if (q0 > 0 || q1 > 0) plus.push(q0, q1);
        }
    }

    // exact up to rounding; renormalize so drift cannot compound over deep
    // recursions into highly polarized channels. Flooring at the smallest
    // normal double keeps repeated squaring from underflowing a conditional
    // to exact zero, which would poison the merge with log(0) terms; the
    // injected mass (< 1e-300 total) vanishes in the renormalization.
    for (DiscreteBMC* ch : {&minus, &plus}) {
        long double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < ch->size(); ++i) {
            ch->p0[i] = std::max(ch->p0[i], DBL_MIN);
            ch->p1[i] = std::max(ch->p1[i], DBL_MIN);
            s0 += ch->p0[i];
            s1 += ch->p1[i];
        }
        for (std::size_t i = 0; i < ch->size(); ++i) {
            ch->p0[i] = static_cast<double>(ch->p0[i] / s0);
            ch->p1[i] = static_cast<double>(ch->p1[i] / s1);
        }
    }

    return {quantize_channel(minus, mu), quantize_channel(plus, mu)};
}

namespace {

void evolve_rec(const DiscreteBMC& w, int stages, int mu, std::vector<double>& out,
                std::vector<double>* pe) {
    if (stages == 0) {
        out.push_back(std::min(1.0, w.bhattacharyya()));
        if (pe) pe->push_back(w.error_prob());
        return;
    }
    auto pair = polar_transform_pair(w, mu);
    evolve_rec(pair.first, stages - 1, mu, out, pe);
    evolve_rec(pair.second, stages - 1, mu, out, pe);
}

}  // namespace

std::vector<double> evolve_subchannels(const DiscreteBMC& w, int N, int mu,
                                       std::vector<double>* pe_out) {
    if (!power_of_two(N)) throw std::invalid_argument("block length must be a power of 2");
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");
    DiscreteBMC base = quantize_channel(w, mu);
    int stages = 0;
    for (int n = N; n > 1; n >>= 1) ++stages;
    std::vector<double> out;
    out.reserve(N);
    if (pe_out) {
        pe_out->clear();
        pe_out->reserve(N);
    }
    evolve_rec(base, stages, mu, out, pe_out);
    return out;
}

LevelCodeSpec select_sets_equal_error(const std::vector<double>& z_channel, double target_pe) {
    if (!(target_pe > 0 && target_pe < 1))
        throw std::invalid_argument("error budget must lie in (0,1)");
    const int n = static_cast<int>(z_channel.size());
    if (!power_of_two(n)) throw std::invalid_argument("index count must be a power of 2");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (z_channel[x] != z_channel[y]) return z_channel[x] < z_channel[y];
        return x < y;
    });

    LevelCodeSpec spec;
    spec.N = n;
    spec.z_channel = z_channel;
    spec.z_source.assign(n, 1.0);
    long double acc = 0.0;
    std::vector<char> is_info(n, 0);
    for (int idx : order) {
        if (acc + z_channel[idx] > target_pe) break;
        acc += z_channel[idx];
        is_info[idx] = 1;
    }
    for (int i = 0; i < n; ++i) (is_info[i] ? spec.info : spec.frozen).push_back(i);
    return spec;
}

LevelCodeSpec select_sets_equal_error(const std::vector<double>& z_channel,
                                      const std::vector<double>& pe_channel,
                                      double target_pe, const std::vector<int>& require) {
    if (!(target_pe > 0 && target_pe < 1))
        throw std::invalid_argument("error budget must lie in (0,1)");
    const int n = static_cast<int>(z_channel.size());
    if (!power_of_two(n)) throw std::invalid_argument("index count must be a power of 2");
    if (pe_channel.size() != z_channel.size())
        throw std::invalid_argument("error-probability vector size mismatch");

    std::vector<char> is_info(n, 0);
    long double acc = 0.0;
    for (int idx : require) {
        if (idx < 0 || idx >= n) throw std::invalid_argument("required index out of range");
        if (!is_info[idx]) {
            is_info[idx] = 1;
            acc += pe_channel[idx];
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (z_channel[x] != z_channel[y]) return z_channel[x] < z_channel[y];
        return x < y;
    });
    for (int idx : order) {
        if (is_info[idx]) continue;
        if (acc + pe_channel[idx] > target_pe) break;
        acc += pe_channel[idx];
        is_info[idx] = 1;
    }

    LevelCodeSpec spec;
    spec.N = n;
    spec.z_channel = z_channel;
    spec.z_source.assign(n, 1.0);
    for (int i = 0; i < n; ++i) (is_info[i] ? spec.info : spec.frozen).push_back(i);
    return spec;
}

LevelCodeSpec select_sets_capacity(const std::vector<double>& z_channel, double threshold) {
    if (!(threshold > 0 && threshold < 1)) throw std::invalid_argument("threshold out of (0,1)");
    const int n = static_cast<int>(z_channel.size());
    if (!power_of_two(n)) throw std::invalid_argument("index count must be a power of 2");
    LevelCodeSpec spec;
    spec.N = n;
    spec.z_channel = z_channel;
    spec.z_source.assign(n, 1.0);
    for (int i = 0; i < n; ++i)
        (z_channel[i] <= threshold ? spec.info : spec.frozen).push_back(i);
    return spec;
}

LevelCodeSpec select_sets_asymmetric(const std::vector<double>& z_channel,
                                     const std::vector<double>& z_source, double threshold) {
    if (!(threshold > 0 && threshold < 0.5))
        throw std::invalid_argument("threshold out of (0,0.5)");
    if (z_channel.size() != z_source.size())
        throw std::invalid_argument("z vector lengths differ");
    const int n = static_cast<int>(z_channel.size());
    if (!power_of_two(n)) throw std::invalid_argument("index count must be a power of 2");
    LevelCodeSpec spec;
    spec.N = n;
    spec.z_channel = z_channel;
    spec.z_source = z_source;
    for (int i = 0; i < n; ++i) {
        if (z_channel[i] >= 1.0 - threshold)
            spec.frozen.push_back(i);
        else if (z_channel[i] <= threshold && z_source[i] >= 1.0 - threshold)
            spec.info.push_back(i);
        else
            spec.shaping.push_back(i);
    }
    return spec;
}

double default_selection_threshold(int N) {
    if (!power_of_two(N)) throw std::invalid_argument("block length must be a power of 2");
    double t = std::exp2(-std::pow(static_cast<double>(N), 0.45));
    return std::clamp(t, 1e-9, 0.5);
}

NestingCertificate certify_nesting(const std::vector<LevelCodeSpec>& specs) {
    NestingCertificate cert;
    if (specs.empty()) return cert;
    for (std::size_t i = 1; i < specs.size(); ++i)
        if (specs[i].N != specs[0].N) throw std::invalid_argument("mismatched block lengths");
    for (const auto& s : specs) cert.levels.push_back(s.level);
    for (std::size_t i = 0; i + 1 < specs.size(); ++i) {
        bool ok = std::includes(specs[i + 1].info.begin(), specs[i + 1].info.end(),
                                specs[i].info.begin(), specs[i].info.end());
        cert.pair_ok.push_back(ok);
        if (!ok && cert.first_bad < 0) cert.first_bad = static_cast<int>(i);
        cert.valid = cert.valid && ok;
    }
    return cert;
}

}  // namespace pl
