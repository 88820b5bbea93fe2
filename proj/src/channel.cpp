/*
Channel model implementation: table channels, degrading merge, partition-channel
densities, shaped-channel builders, degradation checks, AWGN sampling.
*/

#include "polarlat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "polarlat/rng.hpp"

namespace pl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Capacity contribution of one output symbol under uniform input, in bits.
double cap_term(double a, double b) {
    double mid = 0.5 * (a + b);
    double s = 0.0;
    if (a > 0) s += 0.5 * a * std::log2(a / mid);
    if (b > 0) s += 0.5 * b * std::log2(b / mid);
    return s;
}

double logsumexp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

void DiscreteBMC::validate() const {
    if (p0.size() != p1.size() || p0.empty())
        throw std::invalid_argument("channel table malformed");
    long double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) {
        if (p0[i] < 0 || p1[i] < 0) throw std::invalid_argument("negative channel probability");
        if (p0[i] == 0 && p1[i] == 0) throw std::invalid_argument("channel output with zero mass");
        s0 += p0[i];
        s1 += p1[i];
    }
    if (std::abs(static_cast<double>(s0) - 1.0) > 1e-12 ||
        std::abs(static_cast<double>(s1) - 1.0) > 1e-12)
        throw std::invalid_argument("channel conditionals do not sum to 1");
}

double DiscreteBMC::capacity() const {
    double c = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) c += cap_term(p0[i], p1[i]);
    return c;
}

double DiscreteBMC::bhattacharyya() const {
    double z = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) z += std::sqrt(p0[i] * p1[i]);
    return z;
}

double DiscreteBMC::error_prob() const {
    double e = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) e += 0.5 * std::min(p0[i], p1[i]);
    return e;
}

DiscreteBMC DiscreteBMC::bsc(double crossover) {
    if (!(crossover >= 0 && crossover <= 1)) throw std::invalid_argument("crossover out of range");
    DiscreteBMC w;
    w.push(1.0 - crossover, crossover);
    w.push(crossover, 1.0 - crossover);
    return w;
}

DiscreteBMC DiscreteBMC::bec(double erasure) {
    if (!(erasure >= 0 && erasure <= 1)) throw std::invalid_argument("erasure out of range");
    DiscreteBMC w;
    if (erasure < 1) {
        w.push(1.0 - erasure, 0.0);
        w.push(0.0, 1.0 - erasure);
    }
    if (erasure > 0) w.push(erasure, erasure);
    return w;
}

DiscreteBMC degrading_merge(const DiscreteBMC& w, int mu) {
    if (mu < 2) throw std::invalid_argument("merge target must be >= 2");
    w.validate();
    const std::size_t m = w.size();
    if (m <= static_cast<std::size_t>(mu)) return w;

    // Sort outputs by log-likelihood ratio (log domain; +-inf at the ends).
    std::vector<double> llr(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (w.p0[i] == 0)
            llr[i] = kInf;
        else if (w.p1[i] == 0)
            llr[i] = -kInf;
        else
            llr[i] = std::log(w.p1[i]) - std::log(w.p0[i]);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (llr[a] != llr[b]) return llr[a] < llr[b];
        return a < b;
    });

    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = w.p0[order[i]];
        b[i] = w.p1[order[i]];
    }

    std::vector<std::ptrdiff_t> prev(m), next(m);
    std::vector<std::uint32_t> version(m, 0);
    std::vector<bool> alive(m, true);
    for (std::size_t i = 0; i < m; ++i) {
        prev[i] = static_cast<std::ptrdiff_t>(i) - 1;
        next[i] = (i + 1 < m) ? static_cast<std::ptrdiff_t>(i + 1) : -1;
    }

    struct Cand {
        double delta;
        std::size_t i, j;
        std::uint32_t vi, vj;
    };
    auto cmp = [](const Cand& x, const Cand& y) { return x.delta > y.delta; };
    std::priority_queue<Cand, std::vector<Cand>, decltype(cmp)> heap(cmp);
    auto push_cand = [&](std::size_t i, std::size_t j) {
        double d = cap_term(a[i], b[i]) + cap_term(a[j], b[j]) - cap_term(a[i] + a[j], b[i] + b[j]);
        heap.push({d, i, j, version[i], version[j]});
    };
    for (std::size_t i = 0; i + 1 < m; ++i) push_cand(i, i + 1);

    std::size_t count = m;
    while (count > static_cast<std::size_t>(mu) && !heap.empty()) {
        Cand c = heap.top();
        heap.pop();
        if (!alive[c.i] || !alive[c.j] || version[c.i] != c.vi || version[c.j] != c.vj) continue;
        a[c.i] += a[c.j];
        b[c.i] += b[c.j];
        alive[c.j] = false;
        next[c.i] = next[c.j];
        if (next[c.j] >= 0) prev[next[c.j]] = static_cast<std::ptrdiff_t>(c.i);
        ++version[c.i];
        --count;
        if (prev[c.i] >= 0) push_cand(static_cast<std::size_t>(prev[c.i]), c.i);
        if (next[c.i] >= 0) push_cand(c.i, static_cast<std::size_t>(next[c.i]));
    }

    DiscreteBMC out;
    out.p0.reserve(count);
    out.p1.reserve(count);
    for (std::size_t i = 0; i < m; ++i)
        if (alive[i]) out.push(a[i], b[i]);
    return out;
}

DiscreteBMC quantize_channel(const DiscreteBMC& fine, int mu) {
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");
    fine.validate();
    if (fine.size() <= static_cast<std::size_t>(mu)) return fine;
    return degrading_merge(fine, mu);
}

DiscreteBMC quantize_channel(const ContinuousBMC& ch, int mu) {
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");
    if (!(ch.hi > ch.lo) || ch.fine_bins < 2) throw std::invalid_argument("bad channel support");
    const int k = ch.fine_bins;
    const double h = (ch.hi - ch.lo) / k;
    DiscreteBMC fine;
    fine.p0.reserve(k);
    fine.p1.reserve(k);
    auto simpson = [&](const std::function<double(double)>& f, double lo, double hi) {
        return (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi)) * (hi - lo) / 6.0;
    };
    long double s0 = 0.0, s1 = 0.0;
    std::vector<double> m0(k), m1(k);
    for (int i = 0; i < k; ++i) {
        double lo = ch.lo + i * h, hi = lo + h;
        m0[i] = simpson(ch.f0, lo, hi);
        m1[i] = simpson(ch.f1, lo, hi);
        s0 += m0[i];
        s1 += m1[i];
    }
    for (int i = 0; i < k; ++i) {
        double q0 = static_cast<double>(m0[i] / s0), q1 = static_cast<double>(m1[i] / s1);
        if (q0 > 0 || q1 > 0) fine.push(q0, q1);
    }
    return quantize_channel(fine, mu);
}

double log_aliased_gaussian(double u, double sigma, double period) {
    if (!(sigma > 0) || !(period > 0)) throw std::invalid_argument("bad alias parameters");
    const double m = mod_half_open(u, period);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double base = -m * m * inv2s2;
    double sum = 1.0;
    for (int k = 1; k < 100000; ++k) {
        double lp = -(m - k * period) * (m - k * period) * inv2s2 - base;
        double lm = -(m + k * period) * (m + k * period) * inv2s2 - base;
        double t = std::exp(lp) + std::exp(lm);
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    return base + std::log(sum) - std::log(sigma * std::sqrt(2.0 * kPi));
}

namespace {

// Shift of the observation implied by input bit and conditioning label bits.
void level_offset(const PartitionChain& chain, int ell, int x_ell, unsigned x_prefix,
                  double off[2]) {
    off[0] = off[1] = 0.0;
    double g[2];
    for (int j = 1; j < ell; ++j) {
        if ((x_prefix >> (j - 1)) & 1u) {
            chain.coset_rep(j, g);
            off[0] += g[0];
            off[1] += g[1];
        }
    }
    if (x_ell) {
        chain.coset_rep(ell, g);
        off[0] += g[0];
        off[1] += g[1];
    }
}

double log_mod_density(const PartitionChain& chain, int ell, double sigma,
                       const double y_bar[2], int x_ell, unsigned x_prefix) {
    double off[2];
    level_offset(chain, ell, x_ell, x_prefix, off);
    double u0 = y_bar[0] - off[0];
    if (chain.n == 1) return log_aliased_gaussian(u0, sigma, std::pow(2.0, ell));
    double u1 = y_bar[1] - off[1];
    rpow_apply_inv(ell, u0, u1);
    double s = sigma / std::pow(2.0, 0.5 * ell);
    return -ell * std::log(2.0) + log_aliased_gaussian(u0, s, 1.0) +
           log_aliased_gaussian(u1, s, 1.0);
}

}  // namespace

double mod_channel_density(const PartitionChain& chain, int ell, double sigma,
                           const double y_bar[2], int x_ell, unsigned x_prefix) {
    chain.validate();
    if (ell < 1 || ell > chain.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    double red[2] = {y_bar[0], chain.n == 2 ? y_bar[1] : 0.0};
    chain.mod_symbol(red, ell);
    double drift = std::abs(red[0] - y_bar[0]) +
                   (chain.n == 2 ? std::abs(red[1] - y_bar[1]) : 0.0);
    if (drift > 1e-9) throw std::invalid_argument("observation outside the level region");
    return std::exp(log_mod_density(chain, ell, sigma, y_bar, x_ell, x_prefix));
}

double mod_channel_llr(const PartitionChain& chain, int ell, double sigma,
                       const double y_bar[2], unsigned x_prefix) {
    chain.validate();
    if (ell < 1 || ell > chain.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    return log_mod_density(chain, ell, sigma, y_bar, 0, x_prefix) -
           log_mod_density(chain, ell, sigma, y_bar, 1, x_prefix);
}

DiscreteBMC quantize_level_channel(const PartitionChain& chain, int ell, double sigma,
                                   int mu, int fine_bins) {
    chain.validate();
    if (ell < 1 || ell > chain.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");

    if (chain.n == 1) {
        double half = std::pow(2.0, ell - 1);
        ContinuousBMC ch;
        ch.lo = -half;
        ch.hi = half;
        ch.fine_bins = fine_bins;
        double period = 2.0 * half, g = half;
        ch.f0 = [sigma, period](double y) { return std::exp(log_aliased_gaussian(y, sigma, period)); };
        ch.f1 = [sigma, period, g](double y) {
            return std::exp(log_aliased_gaussian(y - g, sigma, period));
        };
        return quantize_channel(ch, mu);
    }

    // 2-D level: in R^{-ell} coordinates the two components are independent
    // unit-period aliased Gaussians, and the input offset is (1/2, 1/2).
    double s = sigma / std::pow(2.0, 0.5 * ell);
    int k = std::max(16, static_cast<int>(std::lround(std::sqrt(double(fine_bins)) * 4)));
    double h = 1.0 / k;
    std::vector<double> bin0(k), bin1(k);
    auto f0 = [s](double v) { return std::exp(log_aliased_gaussian(v, s, 1.0)); };
    auto f1 = [s](double v) { return std::exp(log_aliased_gaussian(v - 0.5, s, 1.0)); };
    double t0 = 0.0, t1 = 0.0;
    for (int i = 0; i < k; ++i) {
        double lo = -0.5 + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
        bin0[i] = (f0(lo) + 4 * f0(mid) + f0(hi)) * h / 6.0;
        bin1[i] = (f1(lo) + 4 * f1(mid) + f1(hi)) * h / 6.0;
        t0 += bin0[i];
        t1 += bin1[i];
    }
    for (int i = 0; i < k; ++i) {
        bin0[i] /= t0;
        bin1[i] /= t1;
    }
    // Product cells; (i,j) and (j,i) have identical conditionals, keep one.
    DiscreteBMC fine;
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            double mult = (i == j) ? 1.0 : 2.0;
            double q0 = mult * bin0[i] * bin0[j];
            double q1 = mult * bin1[i] * bin1[j];
            if (q0 > 0 || q1 > 0) fine.push(q0, q1);
        }
    }
    return quantize_channel(fine, mu);
}

void AsymmetricLevelChannel::validate() const {
    if (!pmf) throw std::invalid_argument("shaped channel needs a pmf");
    pmf->spec.validate();
    if (pmf->center != 0.0)
        throw std::invalid_argument("shaped channels require a zero-centered pmf");
    if (level < 1 || level > pmf->spec.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    if (level > 1 && cond_prefix >= (1u << (level - 1)))
        throw std::invalid_argument("conditioning label out of range");
}

double asymmetric_density(const AsymmetricLevelChannel& ch, double y, int x_ell) {
    ch.validate();
    const DiscreteGaussianPmf& pmf = *ch.pmf;
    const int ell = ch.level;
    const unsigned res =
        (ch.cond_prefix | (static_cast<unsigned>(x_ell & 1) << (ell - 1))) & ((1u << ell) - 1u);
    const double coset = pmf.coset_mass(ell, res);
    if (coset <= 0.0) return 0.0;

    const double ss = ch.sigma_s(), sg = ch.sigma;
    const double alpha = ch.mmse_alpha(), st = ch.sigma_tilde();
    // log of the truncated-prior normalizer, read off the most likely point.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < pmf.p.size(); ++i)
        if (pmf.p[i] > pmf.p[imax]) imax = i;
    double lam_max = pmf.lo + static_cast<double>(imax);
    double log_zs = -(lam_max - pmf.center) * (lam_max - pmf.center) / (2.0 * ss * ss) -
                    std::log(pmf.p[imax]);

    const int period = 1 << ell;
    std::vector<double> expo;
    for (int lam = pmf.lo; lam <= pmf.hi(); ++lam) {
        if (((lam % period) + period) % period != static_cast<int>(res)) continue;
        double d = alpha * y - lam;
        expo.push_back(-d * d / (2.0 * st * st));
    }
    if (expo.empty()) return 0.0;
    double logf = -y * y / (2.0 * (ss * ss + sg * sg)) - std::log(sg * std::sqrt(2.0 * kPi)) -
                  log_zs - std::log(coset) + logsumexp(expo);
    return std::exp(logf);
}

double shaped_level_llr(const DiscreteGaussianPmf& pmf, int ell, unsigned prefix,
                        double alpha_y, double sigma_tilde) {
    const int r = pmf.spec.r;
    if (ell < 1 || ell > r) throw std::invalid_argument("level out of range");
    if (pmf.center != 0.0) throw std::invalid_argument("llr evaluator requires a zero-centered pmf");
    const int parent = 1 << (ell - 1);
    const double inv2st2 = 1.0 / (2.0 * sigma_tilde * sigma_tilde);
    std::vector<double> e0, e1;
    for (int lam = pmf.lo; lam <= pmf.hi(); ++lam) {
        int resp = ((lam % parent) + parent) % parent;
        if (resp != static_cast<int>(prefix & (parent - 1u))) continue;
        double d = alpha_y - lam;
        double e = -d * d * inv2st2;
        int bit = DiscreteGaussianPmf::label_bit(lam, ell, r);
        (bit ? e1 : e0).push_back(e);
    }
    if (e0.empty() && e1.empty()) return 0.0;
    if (e1.empty()) return 745.0;
    if (e0.empty()) return -745.0;
    return std::clamp(logsumexp(e0) - logsumexp(e1), -745.0, 745.0);
}

DiscreteBMC quantize_shaped_level_channel(const DiscreteGaussianPmf& pmf, int ell,
                                          double sigma, int mu, int fine_bins) {
    pmf.spec.validate();
    if (ell < 1 || ell > pmf.spec.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    if (mu < 2) throw std::invalid_argument("alphabet target must be >= 2");
    const int k = std::max(16, fine_bins);
    const double wlo = pmf.lo - 10.0 * sigma, whi = pmf.hi() + 10.0 * sigma;
    const double h = (whi - wlo) / k;
    const int period = 1 << ell;

    // Per-residue observation mass in each fine bin; end bins absorb the tails.
    std::vector<std::vector<double>> res_mass(period, std::vector<double>(k, 0.0));
    for (int lam = pmf.lo; lam <= pmf.hi(); ++lam) {
        double pl = pmf.prob(lam);
        if (pl <= 0) continue;
        int res = ((lam % period) + period) % period;
        double prev_cdf = 0.0;
        for (int i = 0; i < k; ++i) {
            double edge = (i + 1 == k) ? 1.0 : normal_cdf((wlo + (i + 1) * h - lam) / sigma);
            res_mass[res][i] += pl * (edge - prev_cdf);
            prev_cdf = edge;
        }
    }

    // Symmetrized channel outputs (bin, c, d): mass given input x~ is the
    // residue c + (d xor x~) 2^{ell-1}.
    DiscreteBMC fine;
    for (int c = 0; c < period / 2; ++c) {
        for (int d = 0; d < 2; ++d) {
            const auto& v0 = res_mass[c + d * (period / 2)];
            const auto& v1 = res_mass[c + (1 - d) * (period / 2)];
            for (int i = 0; i < k; ++i) {
                if (v0[i] > 0 || v1[i] > 0) fine.push(v0[i], v1[i]);
            }
        }
    }
    double s0 = static_cast<double>(
        std::accumulate(fine.p0.begin(), fine.p0.end(), static_cast<long double>(0.0)));
    double s1 = static_cast<double>(
        std::accumulate(fine.p1.begin(), fine.p1.end(), static_cast<long double>(0.0)));
    for (auto& v : fine.p0) v /= s0;
    for (auto& v : fine.p1) v /= s1;
    return quantize_channel(fine, mu);
}

DiscreteBMC shaped_source_channel(const DiscreteGaussianPmf& pmf, int ell) {
    pmf.spec.validate();
    if (ell < 1 || ell > pmf.spec.r) throw std::invalid_argument("level out of range");
    const int half = 1 << (ell - 1);
    DiscreteBMC w;
    for (int c = 0; c < half; ++c) {
        for (int d = 0; d < 2; ++d) {
            double a = pmf.coset_mass(ell, static_cast<unsigned>(c + d * half));
            double b = pmf.coset_mass(ell, static_cast<unsigned>(c + (1 - d) * half));
            if (a > 0 || b > 0) w.push(a, b);
        }
    }
    return w;
}

DegradeWitness degrade_check(const DiscreteBMC& coarse, const DiscreteBMC& fine) {
    coarse.validate();
    fine.validate();
    double ic = coarse.capacity(), iff = fine.capacity();
    double zc = coarse.bhattacharyya(), zf = fine.bhattacharyya();
    DegradeWitness wit;
    wit.ok = (ic <= iff + 1e-9) && (zc >= zf - 1e-9);
    std::ostringstream os;
    os << "I(coarse)=" << ic << (ic <= iff + 1e-9 ? " <= " : " > ") << "I(fine)=" << iff
       << "; Z(coarse)=" << zc << (zc >= zf - 1e-9 ? " >= " : " < ") << "Z(fine)=" << zf;
    wit.detail = os.str();
    return wit;
}

double verify_chain_degradation(const PartitionChain& chain, int ell, double sigma,
                                int grid) {
    chain.validate();
    if (ell < 1 || ell >= chain.r) throw std::invalid_argument("level out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    if (grid < 4) throw std::invalid_argument("grid too small");

    // Both chains reduce to scaled mod-2 channels per (transformed) coordinate:
    // level ell is the level ell+1 channel plus independent aliased noise.
    double sc, sf;
    if (chain.n == 1) {
        sc = sigma / std::pow(2.0, ell - 1);
        sf = 0.5 * sc;
    } else {
        sc = sigma * std::pow(2.0, 1.0 - 0.5 * ell);
        sf = sc / std::sqrt(2.0);
    }
    double sd = std::sqrt(sc * sc - sf * sf);

    // Periodic integrand: uniform (trapezoid) rule over one period is spectral.
    const int m = 4096;
    const double hq = 2.0 / m;
    double worst = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int g = 0; g < grid; ++g) {
            double u = -1.0 + (g + 0.5) * (2.0 / grid);
            double direct = std::exp(log_aliased_gaussian(u - x, sc, 2.0));
            double conv = 0.0;
            for (int q = 0; q < m; ++q) {
                double yp = -1.0 + q * hq;
                conv += std::exp(log_aliased_gaussian(u - yp, sd, 2.0)) *
                        std::exp(log_aliased_gaussian(yp - x, sf, 2.0));
            }
            conv *= hq;
            worst = std::max(worst, std::abs(direct - conv));
        }
    }
    return worst;
}

void NoiseModel::validate() const {
    if (!(sigma > 0)) throw std::invalid_argument("noise sigma must be positive");
}

std::vector<double> awgn_sample(const NoiseModel& nm, std::size_t len) {
    nm.validate();
    if (len < 1) throw std::invalid_argument("sample length must be >= 1");
    GaussianStream gs(nm.seed);
    std::vector<double> out(len);
    for (auto& v : out) v = nm.sigma * gs.next();
    return out;
}

}  // namespace pl
