/*
Channel model tests: table invariants, degrading merge, partition-channel
densities against brute-force sums, shaped channels, degradation checks.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polarlat/channel.hpp"
#include "polarlat/lattice.hpp"

using namespace pl;

namespace {
constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x, double sigma) {
    return std::exp(-x * x / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * kPi));
}

double brute_aliased(double u, double sigma, double period) {
    double s = 0.0;
    for (int k = -200; k <= 200; ++k) s += normal_pdf(u - k * period, sigma);
    return s;
}

double binary_entropy(double p) {
    if (p <= 0 || p >= 1) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}
}  // namespace

TEST_CASE("table channel basics") {
    auto bsc = DiscreteBMC::bsc(0.11);
    bsc.validate();
    CHECK(bsc.capacity() == doctest::Approx(1.0 - binary_entropy(0.11)).epsilon(1e-12));
    CHECK(bsc.bhattacharyya() == doctest::Approx(2 * std::sqrt(0.11 * 0.89)).epsilon(1e-12));
    CHECK(bsc.error_prob() == doctest::Approx(0.11).epsilon(1e-12));

    auto bec = DiscreteBMC::bec(0.5);
    bec.validate();
    CHECK(bec.capacity() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bec.bhattacharyya() == doctest::Approx(0.5).epsilon(1e-12));

    DiscreteBMC bad;
    bad.push(1.0, 0.5);
    bad.push(0.0, 0.0);
    CHECK_THROWS(bad.validate());
    DiscreteBMC short_sum;
    short_sum.push(0.5, 1.0);
    CHECK_THROWS(short_sum.validate());
}

TEST_CASE("degrading merge reduces alphabet and never gains capacity") {
    // A fine random-ish symmetric channel out of aliased Gaussian bins.
    PartitionChain one{1, 3};
    auto fine = quantize_level_channel(one, 1, 0.25, 4096, 4096);
    CHECK(fine.size() == 4096);
    double cap_fine = fine.capacity();
    std::vector<int> mus = {16, 32, 64, 128, 256};
    double prev = 0.0;
    for (int mu : mus) {
        auto q = degrading_merge(fine, mu);
        q.validate();
        CHECK(q.size() <= static_cast<std::size_t>(mu));
        CHECK(q.capacity() <= cap_fine + 1e-12);
        CHECK(q.capacity() >= prev - 1e-12);  // monotone in mu
        CHECK(degrade_check(q, fine).ok);
        prev = q.capacity();
    }
    // Identity when already small enough.
    auto small = DiscreteBMC::bsc(0.2);
    auto same = quantize_channel(small, 128);
    CHECK(same.size() == 2);
    CHECK(same.p0[0] == small.p0[0]);
    CHECK_THROWS(degrading_merge(small, 1));
}

TEST_CASE("merging a BEC is lossless at any size") {
    // Split the erasure symbol into many duplicates; merge must recover C = 1 - e.
    DiscreteBMC w;
    double e = 0.37;
    w.push((1 - e), 0.0);
    w.push(0.0, (1 - e));
    for (int i = 0; i < 64; ++i) w.push(e / 64, e / 64);
    w.validate();
    auto q = degrading_merge(w, 4);
    CHECK(q.capacity() == doctest::Approx(1 - e).epsilon(1e-12));
    CHECK(q.bhattacharyya() == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("aliased gaussian log density") {
    for (double sigma : {0.1, 0.34, 1.0, 3.0}) {
        for (double u : {-0.9, -0.2, 0.0, 0.5, 1.7}) {
            double got = std::exp(log_aliased_gaussian(u, sigma, 2.0));
            CHECK(got == doctest::Approx(brute_aliased(u, sigma, 2.0)).epsilon(1e-12));
        }
    }
    // Wide noise: density approaches uniform 1/period.
    CHECK(std::exp(log_aliased_gaussian(0.3, 50.0, 2.0)) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("mod channel density, one dimension") {
    PartitionChain one{1, 3};
    double sigma = 0.1690;
    double y[2] = {0.0, 0.0};
    CHECK(mod_channel_density(one, 1, sigma, y, 0, 0) ==
          doctest::Approx(brute_aliased(0.0, sigma, 2.0)).epsilon(1e-12));
    // Coset translation symmetry: f(y|1) = f(y-1 mod 2 | 0).
    for (double yy : {-0.7, 0.3, 0.9}) {
        double ya[2] = {yy, 0.0};
        double yb[2] = {mod_half_open(yy - 1.0, 2.0), 0.0};
        CHECK(mod_channel_density(one, 1, sigma, ya, 1, 0) ==
              doctest::Approx(mod_channel_density(one, 1, sigma, yb, 0, 0)).epsilon(1e-12));
    }
    // Conditioning label shifts by lower-level representatives.
    double y2[2] = {1.3, 0.0};
    CHECK(mod_channel_density(one, 2, sigma, y2, 0, 1u) ==
          doctest::Approx(brute_aliased(1.3 - 1.0, sigma, 4.0)).epsilon(1e-12));
    double outside[2] = {1.5, 0.0};
    CHECK_THROWS(mod_channel_density(one, 1, sigma, outside, 0, 0));
    // LLR consistency with the densities.
    double y3[2] = {0.4, 0.0};
    double l = mod_channel_llr(one, 1, sigma, y3, 0);
    CHECK(l == doctest::Approx(std::log(mod_channel_density(one, 1, sigma, y3, 0, 0) /
                                        mod_channel_density(one, 1, sigma, y3, 1, 0)))
                   .epsilon(1e-10));
}

TEST_CASE("mod channel density, two dimensions") {
    PartitionChain two{2, 4};
    double sigma = 0.332;
    for (int ell : {1, 2, 3}) {
        for (double a : {-0.3, 0.2}) {
            for (double b : {-0.1, 0.4}) {
                double y[2] = {a, b};
                double red[2] = {a, b};
                two.mod_symbol(red, ell);
                if (std::abs(red[0] - a) + std::abs(red[1] - b) > 1e-9) continue;
                for (int x : {0, 1}) {
                    // Brute 2-D alias sum over the depth-ell lattice.
                    double g[2];
                    two.coset_rep(ell, g);
                    double brute = 0.0;
                    for (int i = -40; i <= 40; ++i) {
                        for (int j = -40; j <= 40; ++j) {
                            double w0 = i, w1 = j;
                            rpow_apply(ell, w0, w1);
                            double dx = a - x * g[0] - w0, dy = b - x * g[1] - w1;
                            brute += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) /
                                     (2 * kPi * sigma * sigma);
                        }
                    }
                    CHECK(mod_channel_density(two, ell, sigma, y, x, 0) ==
                          doctest::Approx(brute).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("quantized level channel capacity values") {
    PartitionChain one{1, 3};
    // Middle level of the two-level design: C ~ 0.9874.
    auto w = quantize_level_channel(one, 1, 0.1690, 128);
    CHECK(w.size() <= 128);
    CHECK(w.capacity() == doctest::Approx(0.9874).epsilon(2e-3));
    // Fine reference never below the merged table.
    auto fine = quantize_level_channel(one, 1, 0.1690, 16 * 128, 4096);
    CHECK(w.capacity() <= fine.capacity() + 1e-12);
    CHECK(fine.capacity() - w.capacity() < 1e-4);
}

TEST_CASE("level ordering after quantization") {
    for (int n : {1, 2}) {
        PartitionChain chain{n, 4};
        double sigma = n == 1 ? 0.3380 : 0.332;
        double zprev = 2.0;
        for (int ell = 1; ell <= 3; ++ell) {
            auto w = quantize_level_channel(chain, ell, sigma, 128);
            double z = w.bhattacharyya();
            CHECK(z <= zprev + 1e-9);  // deeper level is less noisy
            zprev = z;
        }
        auto w1 = quantize_level_channel(chain, 1, sigma, 128);
        auto w2 = quantize_level_channel(chain, 2, sigma, 128);
        CHECK(degrade_check(w1, w2).ok);
    }
}

TEST_CASE("scaled equivalence of the two-dimensional levels") {
    PartitionChain two{2, 4};
    double sigma = 0.4;
    auto w2 = quantize_level_channel(two, 2, sigma, 128);
    auto w1 = quantize_level_channel(two, 1, sigma / std::sqrt(2.0), 128);
    CHECK(w2.capacity() == doctest::Approx(w1.capacity()).epsilon(1e-9));
    CHECK(w2.bhattacharyya() == doctest::Approx(w1.bhattacharyya()).epsilon(1e-9));
}

TEST_CASE("asymmetric density normalizes and matches the direct mixture") {
    DiscreteGaussianSpec spec{3.0, 5, required_support_radius(3.0)};
    auto pmf = discrete_gaussian_pmf(spec);
    AsymmetricLevelChannel ch;
    ch.pmf = &pmf;
    ch.sigma = 0.5334;
    CHECK(ch.sigma_tilde() * ch.sigma_tilde() ==
          doctest::Approx(ch.mmse_alpha() * ch.sigma * ch.sigma).epsilon(1e-12));
    for (int ell : {1, 2, 3}) {
        ch.level = ell;
        for (unsigned prefix : {0u, 1u}) {
            if (ell == 1 && prefix > 0) continue;
            ch.cond_prefix = prefix & ((1u << (ell - 1)) - 1u);
            for (int x : {0, 1}) {
                // Direct mixture of Gaussians over the coset.
                int period = 1 << ell;
                int res = static_cast<int>(ch.cond_prefix) + x * (period / 2);
                double m = pmf.coset_mass(ell, static_cast<unsigned>(res));
                for (double y : {-2.0, 0.0, 1.3, 4.0}) {
                    double direct = 0.0;
                    for (int lam = pmf.lo; lam <= pmf.hi(); ++lam) {
                        if (((lam % period) + period) % period != res) continue;
                        direct += pmf.prob(lam) / m * normal_pdf(y - lam, ch.sigma);
                    }
                    CHECK(asymmetric_density(ch, y, x) == doctest::Approx(direct).epsilon(1e-9));
                }
                // Integral over y equals 1 (Simpson over the support window).
                double lo = pmf.lo - 8 * ch.sigma, hi = pmf.hi() + 8 * ch.sigma;
                int steps = 20000;
                double h = (hi - lo) / steps, acc = 0.0;
                for (int i = 0; i < steps; ++i) {
                    double a = lo + i * h;
                    acc += (asymmetric_density(ch, a, x) +
                            4 * asymmetric_density(ch, a + h / 2, x) +
                            asymmetric_density(ch, a + h, x)) *
                           h / 6;
                }
                CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("posterior llr equals the mod-channel llr at the rescaled point") {
    DiscreteGaussianSpec spec{3.0, 5, required_support_radius(3.0)};
    auto pmf = discrete_gaussian_pmf(spec);
    AsymmetricLevelChannel ch;
    ch.pmf = &pmf;
    ch.sigma = 0.5334;
    ch.level = 1;
    PartitionChain one{1, 1};
    double st = ch.sigma_tilde(), alpha = ch.mmse_alpha();
    for (double y : {-2.5, -0.8, 0.0, 0.4, 1.9, 3.0}) {
        double ay = alpha * y;
        double red[2] = {mod_half_open(ay, 2.0), 0.0};
        CHECK(shaped_level_llr(pmf, 1, 0, ay, st) ==
              doctest::Approx(mod_channel_llr(one, 1, st, red, 0)).epsilon(1e-6));
    }
    // Consistency with the density ratio including the prior.
    ch.level = 2;
    ch.cond_prefix = 1;
    for (double y : {-1.2, 0.3, 2.2}) {
        double p0 = ch.prior0();
        double num = p0 * asymmetric_density(ch, y, 0);
        double den = (1 - p0) * asymmetric_density(ch, y, 1);
        CHECK(shaped_level_llr(pmf, 2, 1, ch.mmse_alpha() * y, ch.sigma_tilde()) ==
              doctest::Approx(std::log(num / den)).epsilon(1e-8));
    }
}

TEST_CASE("symmetrized source channel carries the conditional entropy") {
    DiscreteGaussianSpec spec{3.0, 5, required_support_radius(3.0)};
    auto pmf = discrete_gaussian_pmf(spec);
    for (int ell = 1; ell <= 5; ++ell) {
        auto src = shaped_source_channel(pmf, ell);
        src.validate();
        double hx = 0.0;  // H(X_ell | X_{1:ell-1})
        for (unsigned c = 0; c < (1u << (ell - 1)); ++c) {
            double pc = pmf.coset_mass(ell - 1, c);
            if (pc <= 0) continue;
            hx += pc * binary_entropy(pmf.level_bit_prob(ell, c, 0));
        }
        CHECK(src.capacity() == doctest::Approx(1.0 - hx).epsilon(1e-10));
        // Source Bhattacharyya: sum over labels of 2 P(c) sqrt(p0 p1).
        double zs = 0.0;
        for (unsigned c = 0; c < (1u << (ell - 1)); ++c) {
            double pc = pmf.coset_mass(ell - 1, c);
            double p0 = pmf.level_bit_prob(ell, c, 0);
            zs += 2 * pc * std::sqrt(p0 * (1 - p0));
        }
        CHECK(src.bhattacharyya() == doctest::Approx(zs).epsilon(1e-10));
    }
}

TEST_CASE("symmetrized shaped channel") {
    DiscreteGaussianSpec spec{3.0, 5, required_support_radius(3.0)};
    auto pmf = discrete_gaussian_pmf(spec);
    double sigma = 0.5334;
    for (int ell : {1, 2}) {
        auto w = quantize_shaped_level_channel(pmf, ell, sigma, 128);
        w.validate();
        CHECK(w.size() <= 128);
        CHECK(w.capacity() >= 0.0);
        CHECK(w.capacity() <= 1.0 + 1e-12);
        // Observation only helps: channel z below source-only z.
        auto src = shaped_source_channel(pmf, ell);
        CHECK(w.bhattacharyya() <= src.bhattacharyya() + 1e-6);
    }
    // Nearly noiseless observation pins the input bit.
    auto sharp = quantize_shaped_level_channel(pmf, 1, 0.05, 128);
    CHECK(sharp.capacity() > 0.99);
    // More noise is a degradation.
    auto w_hi = quantize_shaped_level_channel(pmf, 1, 0.9, 128);
    auto w_lo = quantize_shaped_level_channel(pmf, 1, 0.5, 128);
    CHECK(degrade_check(w_hi, w_lo).ok);
}

TEST_CASE("degrade check orders classic channels") {
    auto b1 = DiscreteBMC::bsc(0.1), b2 = DiscreteBMC::bsc(0.2);
    CHECK_FALSE(degrade_check(b1, b2).ok);
    CHECK(degrade_check(b2, b1).ok);
    CHECK(degrade_check(b1, b1).ok);
    auto w = DiscreteBMC::bec(0.3);
    CHECK(degrade_check(w, w).ok);
}

TEST_CASE("intermediate channel reproduces the coarser level") {
    PartitionChain one{1, 4};
    CHECK(verify_chain_degradation(one, 1, 0.3380) < 1e-6);
    CHECK(verify_chain_degradation(one, 2, 0.3380) < 1e-6);
    PartitionChain two{2, 5};
    CHECK(verify_chain_degradation(two, 1, 0.332) < 1e-6);
    CHECK(verify_chain_degradation(two, 2, 0.332) < 1e-6);
    CHECK(verify_chain_degradation(two, 3, 0.332) < 1e-6);
}

TEST_CASE("awgn sampling is seeded and calibrated") {
    NoiseModel nm{0.7, 12345};
    auto a = awgn_sample(nm, 1000);
    auto b = awgn_sample(nm, 1000);
    CHECK(a == b);
    NoiseModel other{0.7, 54321};
    CHECK(awgn_sample(other, 1000) != a);

    const std::size_t n = 1000000;
    auto big = awgn_sample(nm, n);
    double mean = 0.0;
    for (double v : big) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : big) var += (v - mean) * (v - mean);
    var /= n;
    CHECK(std::abs(mean) < 4 * 0.7 / 1000.0);
    CHECK(std::abs(var - 0.49) < 0.01 * 0.49);
}
