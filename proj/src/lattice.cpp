/*
Lattice substrate implementation: chain geometry, theta sums, discrete Gaussians.
*/

#include "polarlat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}  // namespace

double mod_half_open(double x, double v) {
    double m = x - v * std::ceil(x / v - 0.5);
    // Guard against rounding placing us on the open end.
    if (m <= -0.5 * v) m += v;
    if (m > 0.5 * v) m -= v;
    return m;
}

void rpow_apply(int k, double& x0, double& x1) {
    // R^{2j} = 2^j I; apply one extra R for odd k.
    int half = k / 2;
    double s = std::pow(2.0, half);
    x0 *= s;
    x1 *= s;
    if (k % 2) {
        double a = x0 + x1, b = x0 - x1;
        x0 = a;
        x1 = b;
    }
}

void rpow_apply_inv(int k, double& x0, double& x1) {
    rpow_apply(k, x0, x1);
    double s = std::pow(2.0, k);
    x0 /= s;
    x1 /= s;
}

void PartitionChain::coset_rep(int ell, double g[2]) const {
    validate();
    if (ell < 1 || ell > r) throw std::invalid_argument("coset level out of range");
    if (n == 1) {
        g[0] = std::pow(2.0, ell - 1);
        g[1] = 0.0;
    } else {
        g[0] = 1.0;
        g[1] = 0.0;
        rpow_apply(ell - 1, g[0], g[1]);
    }
}

void PartitionChain::mod_symbol(double x[2], int k) const {
    if (n == 1) {
        x[0] = mod_half_open(x[0], std::pow(2.0, k));
    } else {
        rpow_apply_inv(k, x[0], x[1]);
        x[0] = mod_half_open(x[0], 1.0);
        x[1] = mod_half_open(x[1], 1.0);
        rpow_apply(k, x[0], x[1]);
    }
}

void PartitionChain::round_symbol(double x[2], int k) const {
    double m[2] = {x[0], x[1]};
    mod_symbol(m, k);
    x[0] -= m[0];
    if (n == 2) x[1] -= m[1];
}

LatticePoint mod_region(const PartitionChain& chain, const LatticePoint& x, int k) {
    chain.validate();
    if (k < 0 || k > chain.r) throw std::invalid_argument("mod level out of range");
    if (x.size() % chain.n != 0) throw std::invalid_argument("point length not a multiple of dimension");
    LatticePoint out = x;
    for (std::size_t j = 0; j + chain.n <= out.size(); j += chain.n) {
        double s[2] = {out[j], chain.n == 2 ? out[j + 1] : 0.0};
        chain.mod_symbol(s, k);
        out[j] = s[0];
        if (chain.n == 2) out[j + 1] = s[1];
    }
    return out;
}

double theta_z(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("theta series needs tau > 0");
    double sum = 1.0;
    for (long k = 1; k < 100000000L; ++k) {
        double term = std::exp(-kPi * tau * static_cast<double>(k) * static_cast<double>(k));
        sum += 2.0 * term;
        if (term == 0.0) break;
        // Tail bound: sum_{j>k} exp(-pi tau j^2) < exp(-pi tau k^2) / (2 pi tau k).
        if (term / (2.0 * kPi * tau * k) < 1e-16 * sum) break;
    }
    return sum;
}

double theta_series(const PartitionChain& chain, int depth, double tau) {
    chain.validate();
    if (depth < 0 || depth > chain.r) throw std::invalid_argument("depth out of range");
    double t1 = theta_z(chain.scale_sq(depth) * tau);
    return chain.n == 1 ? t1 : t1 * t1;
}

double flatness_factor(const PartitionChain& chain, int depth, double sigma, bool* valid) {
    chain.validate();
    if (!(sigma > 0)) throw std::invalid_argument("flatness factor needs sigma > 0");
    if (valid) *valid = true;
    double t = chain.scale_sq(depth) / (2.0 * kPi * sigma * sigma);
    if (!std::isfinite(t)) {
        if (valid) *valid = false;
        return 1e300;
    }
    double factor = std::sqrt(t) * theta_z(t);
    double eps = chain.n == 1 ? factor - 1.0 : factor * factor - 1.0;
    if (!std::isfinite(eps) || eps >= 1e300) {
        if (valid) *valid = false;
        return 1e300;
    }
    return eps;
}

int DiscreteGaussianPmf::label_bit(int lambda, int ell, int r) {
    int period = 1 << r;
    int res = ((lambda % period) + period) % period;
    return (res >> (ell - 1)) & 1;
}

double DiscreteGaussianPmf::power() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double lam = static_cast<double>(lo + static_cast<int>(i));
        s += lam * lam * p[i];
    }
    return s;
}

double DiscreteGaussianPmf::coset_mass(int ell, unsigned res) const {
    if (ell < 0 || ell > spec.r) throw std::invalid_argument("coset level out of range");
    return mass_[ell][res & ((1u << ell) - 1u)];
}

double DiscreteGaussianPmf::level_bit_prob(int ell, unsigned prefix, int bit) const {
    if (ell < 1 || ell > spec.r) throw std::invalid_argument("level out of range");
    unsigned parent = prefix & ((1u << (ell - 1)) - 1u);
    double denom = mass_[ell - 1][parent];
    if (denom <= 0.0) return 0.0;
    unsigned res = parent | (static_cast<unsigned>(bit & 1) << (ell - 1));
    return mass_[ell][res] / denom;
}

double DiscreteGaussianPmf::prior_llr(int ell, unsigned prefix) const {
    double p0 = level_bit_prob(ell, prefix, 0);
    double p1 = level_bit_prob(ell, prefix, 1);
    if (p0 <= 0.0 && p1 <= 0.0) return 0.0;
    if (p1 <= 0.0) return 745.0;
    if (p0 <= 0.0) return -745.0;
    return std::clamp(std::log(p0 / p1), -745.0, 745.0);
}

std::vector<double> DiscreteGaussianPmf::folded() const {
    int period = 1 << spec.r;
    std::vector<double> f(period, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        int lambda = lo + static_cast<int>(i);
        int res = ((lambda % period) + period) % period;
        // Fold residue 0..period-1 to the transmit range (-period/2, period/2];
        // index j stores value j - period/2 + 1.
        int value = res > period / 2 ? res - period : res;
        f[value + period / 2 - 1] += p[i];
    }
    return f;
}

DiscreteGaussianPmf discrete_gaussian_pmf(const DiscreteGaussianSpec& spec, double center) {
    spec.validate();
    const double inv2s2 = 1.0 / (2.0 * spec.sigma_s * spec.sigma_s);
    // Total mass over a window wide enough that the remainder is < 1e-18 relative.
    int wide = static_cast<int>(std::ceil(10.0 * spec.sigma_s)) + 2;
    int wlo = static_cast<int>(std::floor(center)) - std::max(wide, spec.support_radius);
    int whi = static_cast<int>(std::ceil(center)) + std::max(wide, spec.support_radius);
    double total = 0.0;
    for (int lam = wlo; lam <= whi; ++lam) {
        double d = lam - center;
        total += std::exp(-d * d * inv2s2);
    }

    int klo = static_cast<int>(std::ceil(center - spec.support_radius));
    int khi = static_cast<int>(std::floor(center + spec.support_radius));
    if (klo > khi) throw std::invalid_argument("support_radius retains no points");
    double kept = 0.0;
    std::vector<double> w(khi - klo + 1);
    for (int lam = klo; lam <= khi; ++lam) {
        double d = lam - center;
        w[lam - klo] = std::exp(-d * d * inv2s2);
        kept += w[lam - klo];
    }
    double discarded = (total - kept) / total;
    if (!(discarded < 1e-12)) {
        throw std::invalid_argument(
            "discrete Gaussian truncation mass " + std::to_string(discarded) +
            " >= 1e-12; required support_radius >= " +
            std::to_string(required_support_radius(spec.sigma_s, center)));
    }

    DiscreteGaussianPmf out;
    out.spec = spec;
    out.center = center;
    out.lo = klo;
    out.p.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.p[i] = w[i] / kept;
    out.discarded = discarded;

    out.mass_.assign(spec.r + 1, {});
    for (int ell = 0; ell <= spec.r; ++ell) {
        out.mass_[ell].assign(std::size_t{1} << ell, 0.0);
        int period = 1 << ell;
        for (std::size_t i = 0; i < out.p.size(); ++i) {
            int lambda = klo + static_cast<int>(i);
            int res = ((lambda % period) + period) % period;
            out.mass_[ell][res] += out.p[i];
        }
    }
    return out;
}

int required_support_radius(double sigma_s, double center) {
    DiscreteGaussianSpec probe{sigma_s, 1, 0};
    probe.validate();
    const double inv2s2 = 1.0 / (2.0 * sigma_s * sigma_s);
    int wide = static_cast<int>(std::ceil(12.0 * sigma_s)) + 2;
    int wlo = static_cast<int>(std::floor(center)) - wide;
    int whi = static_cast<int>(std::ceil(center)) + wide;
    double total = 0.0;
    for (int lam = wlo; lam <= whi; ++lam) {
        double d = lam - center;
        total += std::exp(-d * d * inv2s2);
    }
    for (int radius = 0; radius <= wide; ++radius) {
        double kept = 0.0;
        int klo = static_cast<int>(std::ceil(center - radius));
        int khi = static_cast<int>(std::floor(center + radius));
        for (int lam = klo; lam <= khi; ++lam) {
            double d = lam - center;
            kept += std::exp(-d * d * inv2s2);
        }
        if ((total - kept) / total < 1e-12) return radius;
    }
    return wide;
}

}  // namespace pl
