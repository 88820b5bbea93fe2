/*
Implementation of capacity quadrature, gap accounting, shaped mutual-info
Monte Carlo, union bounds, and curve emission.
*/

#include "polarlat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <utility>

#include "polarlat/channel.hpp"
#include "polarlat/rng.hpp"

namespace pl {

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Adaptive Simpson with the standard /15 refinement estimate.
template <class F>
double adapt(const F& g, double a, double m, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(g, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(g, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Seeds several panels so a narrow central peak cannot be stepped over.
template <class F>
double integrate(const F& g, double a, double b, double tol) {
    const int panels = 8;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        const double f0 = g(x0), f1 = g(x1), fm = g(xm);
        total += adapt(g, x0, xm, x1, f0, fm, f1, simpson(f0, fm, f1, x0, x1), tol / panels, 48);
    }
    return total;
}

// Capacity in bits of the mod-(period Z) channel on one coordinate.
double capacity_1d(double period, double sigma) {
    auto g = [sigma, period](double u) {
        const double lf = log_aliased_gaussian(u, sigma, period);
        return -std::exp(lf) * lf;  // -f ln f
    };
    const double h_nats = 2.0 * integrate(g, 0.0, 0.5 * period, 1e-10);
    const double c = std::log2(period) - h_nats / std::log(2.0);
    return std::max(0.0, c);
}

}  // namespace

double capacity_mod_lattice(const PartitionChain& chain, int depth, double sigma) {
    chain.validate();
    if (depth < 0 || depth > chain.r) throw std::invalid_argument("depth out of range");
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    const double period = std::sqrt(chain.scale_sq(depth));
    return chain.n * capacity_1d(period, sigma);
}

double capacity_partition_level(const PartitionChain& chain, int ell, double sigma) {
    chain.validate();
    if (ell < 1 || ell > chain.r) throw std::invalid_argument("level out of range");
    const double c = capacity_mod_lattice(chain, ell, sigma) -
                     capacity_mod_lattice(chain, ell - 1, sigma);
    return std::clamp(c, 0.0, 1.0);
}

GapReport gap_from_eps(int n, double eps1, double eps3) {
    if (n != 1 && n != 2) throw std::invalid_argument("dimension must be 1 or 2");
    GapReport g;
    g.eps1 = eps1;
    g.eps3 = eps3;
    g.log_vnr_gap_bits = 2.0 / n * (eps1 + eps3);
    g.gap_db = g.log_vnr_gap_bits * 10.0 * std::log10(2.0);
    g.capacity_rule_violated = eps3 < 0.0;
    return g;
}

GapReport gap_report(const PolarLatticeSpec& spec, double sigma_tilde) {
    spec.validate();
    if (!(sigma_tilde > 0)) throw std::invalid_argument("sigma_tilde must be positive");
    const PartitionChain chain = spec.chain();
    const double eps1 = capacity_mod_lattice(chain, 0, sigma_tilde);
    double eps3 = 0.0;
    bool violated = false;
    for (int ell = 1; ell <= spec.r; ++ell) {
        const double c = capacity_partition_level(chain, ell, sigma_tilde);
        const double rate = spec.levels[ell - 1].rate();
        if (rate > c + 1e-12) violated = true;
        eps3 += c - rate;
    }
    GapReport g = gap_from_eps(spec.n, eps1, eps3);
    g.capacity_rule_violated = violated || eps3 < 0.0;
    return g;
}

namespace {

// Inverse-CDF sampler over the retained support of a discrete Gaussian.
struct PmfSampler {
    int lo;
    std::vector<double> cdf;

    explicit PmfSampler(const DiscreteGaussianPmf& pmf) : lo(pmf.lo), cdf(pmf.p.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pmf.p.size(); ++i) {
            acc += pmf.p[i];
            cdf[i] = acc;
        }
        cdf.back() = 1.0;
    }

    int draw(double u01) const {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u01);
        return lo + static_cast<int>(it - cdf.begin());
    }
};

// log2 f(y | x, prefix) - log2 (sum_b P(b|prefix) f(y | b, prefix)).
double level_mi_term(const AsymmetricLevelChannel& ch, double y, int x, double p0) {
    const double fx = asymmetric_density(ch, y, x);
    const double fo = asymmetric_density(ch, y, 1 - x);
    const double px = x ? 1.0 - p0 : p0;
    const double mix = px * fx + (1.0 - px) * fo;
    if (!(fx > 0.0) || !(mix > 0.0)) return 0.0;
    return std::log2(fx / mix);
}

MiEstimate mc_estimate(std::uint64_t samples, std::uint64_t seed,
                       const std::function<double(int, double)>& term,
                       const PmfSampler& sampler, double sigma) {
    const std::uint64_t pairs = std::max<std::uint64_t>(1, samples / 2);
    Xoshiro256 rng(mix2(seed, 0x6d69ULL));
    GaussianStream gs(mix2(seed, 0x6e6fULL));
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < pairs; ++t) {
        const int lam = sampler.draw(rng.uniform01_open0());
        const double e = sigma * gs.next();
        const double v = 0.5 * (term(lam, lam + e) + term(lam, lam - e));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(pairs);
    const double var = std::max(0.0, sum_sq / static_cast<double>(pairs) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(pairs)), 2 * pairs};
}

}  // namespace

MiEstimate level_mutual_info_shaped(double sigma_s, double sigma, int ell,
                                    std::uint64_t samples, std::uint64_t seed) {
    if (!(sigma_s > 0) || !(sigma > 0)) throw std::invalid_argument("parameters must be positive");
    if (ell < 1 || ell > 24) throw std::invalid_argument("level out of range");
    const DiscreteGaussianSpec ds{sigma_s, ell, required_support_radius(sigma_s)};
    const DiscreteGaussianPmf pmf = discrete_gaussian_pmf(ds);
    const PmfSampler sampler(pmf);
    const int parent = 1 << (ell - 1);

    AsymmetricLevelChannel ch;
    ch.level = ell;
    ch.sigma = sigma;
    ch.pmf = &pmf;
    auto term = [&](int lam, double y) {
        ch.cond_prefix = static_cast<unsigned>(((lam % parent) + parent) % parent);
        const int x = DiscreteGaussianPmf::label_bit(lam, ell, ell);
        const double p0 = pmf.level_bit_prob(ell, ch.cond_prefix, 0);
        return level_mi_term(ch, y, x, p0);
    };
    return mc_estimate(samples, seed, term, sampler, sigma);
}

MiEstimate joint_mutual_info_shaped(double sigma_s, double sigma, int levels,
                                    std::uint64_t samples, std::uint64_t seed) {
    if (!(sigma_s > 0) || !(sigma > 0)) throw std::invalid_argument("parameters must be positive");
    if (levels < 1 || levels > 24) throw std::invalid_argument("levels out of range");
    const DiscreteGaussianSpec ds{sigma_s, levels, required_support_radius(sigma_s)};
    const DiscreteGaussianPmf pmf = discrete_gaussian_pmf(ds);
    const PmfSampler sampler(pmf);
    const double ss2 = sigma_s * sigma_s;
    const double alpha = ss2 / (ss2 + sigma * sigma);
    const double inv2st2 = 1.0 / (2.0 * alpha * sigma * sigma);
    const int period = 1 << levels;

    // log2(S_c / (m_c S_all)) with S_* the rescaled Gaussian kernel summed over
    // the class / the whole support; the y-only prefactor cancels in the ratio.
    auto term = [&](int lam, double y) {
        const double ay = alpha * y;
        const int c = ((lam % period) + period) % period;
        double s_class = 0.0, s_all = 0.0;
        for (int p = pmf.lo; p <= pmf.hi(); ++p) {
            const double d = ay - p;
            const double k = std::exp(-d * d * inv2st2);
            s_all += k;
            if (((p % period) + period) % period == c) s_class += k;
        }
        const double mc = pmf.coset_mass(levels, static_cast<unsigned>(c));
        if (!(s_class > 0.0) || !(s_all > 0.0) || !(mc > 0.0)) return 0.0;
        return std::log2(s_class / (mc * s_all));
    };
    return mc_estimate(samples, seed, term, sampler, sigma);
}

double union_bound_pe(const PolarLatticeSpec& spec) {
    spec.validate();
    double z_sum = 0.0;
    for (const auto& lv : spec.levels) z_sum += lv.info_z_sum();
    double s_eff = spec.sigma;
    if (spec.shaped) {
        const double ss2 = spec.sigma_s * spec.sigma_s;
        s_eff *= std::sqrt(ss2 / (ss2 + s_eff * s_eff));
    }
    const PartitionChain chain = spec.chain();
    const double half = 0.5 * std::sqrt(chain.scale_sq(chain.r));
    const double p_out = std::erfc(half / (s_eff * std::sqrt(2.0)));  // per coordinate
    const double escape = chain.n == 1 ? p_out : p_out * (2.0 - p_out);
    return z_sum + spec.N * escape;
}

std::string CapacityCurve::to_csv() const {
    std::string out = "sigma_or_snr,level,value\n";
    char buf[96];
    for (std::size_t i = 0; i < axis.size(); ++i)
        for (std::size_t l = 0; l < values[i].size(); ++l) {
            std::snprintf(buf, sizeof buf, "%.10g,%d,%.10g\n", axis[i],
                          static_cast<int>(l + 1), values[i][l]);
            out += buf;
        }
    return out;
}

CapacityCurve partition_capacity_curve(const PartitionChain& chain,
                                       const std::vector<double>& sigma_grid) {
    chain.validate();
    if (sigma_grid.empty()) throw std::invalid_argument("empty sigma grid");
    CapacityCurve curve;
    curve.axis = sigma_grid;
    for (double s : sigma_grid) {
        std::vector<double> row(chain.r);
        for (int ell = 1; ell <= chain.r; ++ell)
            row[ell - 1] = capacity_partition_level(chain, ell, s);
        curve.values.push_back(std::move(row));
    }
    return curve;
}

CapacityCurve shaped_mi_curve(double sigma_s, const std::vector<double>& snr_db_grid,
                              int levels, std::uint64_t samples, std::uint64_t seed) {
    if (!(sigma_s > 0)) throw std::invalid_argument("sigma_s must be positive");
    if (levels < 1 || levels > 24) throw std::invalid_argument("levels out of range");
    if (snr_db_grid.empty()) throw std::invalid_argument("empty SNR grid");
    const DiscreteGaussianSpec ds{sigma_s, 1, required_support_radius(sigma_s)};
    const double power = discrete_gaussian_pmf(ds).power();
    CapacityCurve curve;
    curve.axis = snr_db_grid;
    for (std::size_t i = 0; i < snr_db_grid.size(); ++i) {
        const double sigma = sigma_for_snr_db(power, snr_db_grid[i]);
        std::vector<double> row(levels);
        for (int ell = 1; ell <= levels; ++ell)
            row[ell - 1] =
                level_mutual_info_shaped(sigma_s, sigma, ell, samples,
                                         mix3(seed, i, static_cast<std::uint64_t>(ell)))
                    .value;
        curve.values.push_back(std::move(row));
    }
    return curve;
}

double log2_norm_volume(const PolarLatticeSpec& spec) {
    spec.validate();
    double rate_sum = 0.0;
    for (const auto& lv : spec.levels) rate_sum += lv.rate();
    return 2.0 / spec.n * (spec.r - rate_sum);
}

double vnr_db(const PolarLatticeSpec& spec, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
    const double v2n = std::exp2(log2_norm_volume(spec));
    return 10.0 * std::log10(v2n / (2.0 * kPi * std::exp(1.0) * sigma * sigma));
}

double sigma_for_vnr_db(const PolarLatticeSpec& spec, double v_db) {
    const double v2n = std::exp2(log2_norm_volume(spec));
    return std::sqrt(v2n / (2.0 * kPi * std::exp(1.0) * std::pow(10.0, v_db / 10.0)));
}

double snr_db_for_sigma(double power, double sigma) {
    if (!(power > 0) || !(sigma > 0)) throw std::invalid_argument("power and sigma must be positive");
    return 10.0 * std::log10(power / (sigma * sigma));
}

double sigma_for_snr_db(double power, double snr_db) {
    if (!(power > 0)) throw std::invalid_argument("power must be positive");
    return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

}  // namespace pl
