/*
Lattice substrate: binary partition chains, theta series, flatness factor,
discrete Gaussian distributions, and modulo reductions.

Two chains are supported, matching the designs this library reproduces:
  1-D: Z / 2Z / 4Z / ... / 2^r Z
  2-D: Z^2 / RZ^2 / 2Z^2 / 2RZ^2 / ... with R = [[1,1],[1,-1]] (row-vector action)

Every lattice in either chain is geometrically a scaled (and for odd 2-D depths
rotated) copy of Z^n, which the numeric routines exploit: only norms and volumes
enter theta series and flatness factors.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pl {

using LatticePoint = std::vector<double>;  // coords, length n*N

struct PartitionChain {
    int n = 1;  // dimension, 1 or 2
    int r = 1;  // number of binary partition levels

    void validate() const {
        if (n != 1 && n != 2) throw std::invalid_argument("chain dimension must be 1 or 2");
        if (r < 1 || r > 30) throw std::invalid_argument("chain levels out of range");
    }

    // Squared per-dimension scale of the depth-k lattice (k = 0..r):
    // Lambda_k is isometric to s_k * Z^n with s_k^2 = 4^k (1-D) or 2^k (2-D).
    double scale_sq(int k) const { return n == 1 ? std::pow(4.0, k) : std::pow(2.0, k); }

    // Fundamental volume of Lambda_k (per n-dimensional symbol): 2^k for both chains.
    double volume(int k) const { return std::pow(2.0, k); }

    // Coset representative generator of level ell (1-based): 1-D 2^{ell-1}, 2-D (1,0)*R^{ell-1}.
    void coset_rep(int ell, double g[2]) const;

    // Reduce one n-dim symbol into the fundamental region of Lambda_k.
    // Convention: half-open (-V/2, V/2] per (R-transformed) coordinate.
    void mod_symbol(double x[2], int k) const;

    // Nearest lattice point of Lambda_k to one symbol (x - mod_symbol(x)).
    void round_symbol(double x[2], int k) const;
};

// Componentwise reduction of a full point (length n*N) into the level-k region.
LatticePoint mod_region(const PartitionChain& chain, const LatticePoint& x, int k);

// Scalar reduction to (-v/2, v/2].
double mod_half_open(double x, double v);

// Row-vector action y = x * R^k and its inverse; R^2 = 2I so R^{-k} = R^k / 2^k.
void rpow_apply(int k, double& x0, double& x1);
void rpow_apply_inv(int k, double& x0, double& x1);

// Theta series of Z: sum_{k in Z} exp(-pi * tau * k^2), relative tail < 1e-15.
double theta_z(double tau);

// Theta series of the depth-k chain lattice.
double theta_series(const PartitionChain& chain, int depth, double tau);

// Flatness factor (gamma/2pi)^{n/2} * Theta(1/(2 pi sigma^2)) - 1.
// On overflow the result saturates and *valid is set false.
double flatness_factor(const PartitionChain& chain, int depth, double sigma, bool* valid = nullptr);

struct DiscreteGaussianSpec {
    double sigma_s = 1.0;    // shaping standard deviation
    int r = 1;               // labeled levels (constellation 2^r points per period)
    int support_radius = 0;  // retain integer points with |lambda - center| <= support_radius

    void validate() const {
        if (!(sigma_s > 0)) throw std::invalid_argument("sigma_s must be positive");
        if (r < 1 || r > 24) throw std::invalid_argument("label levels out of range");
        if (support_radius < 0) throw std::invalid_argument("support_radius must be >= 0");
    }
};

// Truncated, renormalized discrete Gaussian over Z with per-level binary labels.
// Label bit ell of a point is bit (ell-1) of (lambda mod 2^r), LSB first, so the
// level-ell coset of a label prefix c is {lambda : lambda = c + 2^{ell-1} b (mod 2^ell)}.
class DiscreteGaussianPmf {
public:
    DiscreteGaussianSpec spec;
    double center = 0.0;
    int lo = 0;                   // retained points are lo .. lo + p.size() - 1
    std::vector<double> p;        // renormalized probabilities
    double discarded = 0.0;       // relative mass dropped by truncation

    int hi() const { return lo + static_cast<int>(p.size()) - 1; }
    double prob(int lambda) const {
        return (lambda < lo || lambda > hi()) ? 0.0 : p[lambda - lo];
    }
    double power() const;  // E[lambda^2]

    // P(X_ell = bit | X_{1:ell-1} = prefix); prefix packs bits x_1..x_{ell-1} LSB first.
    double level_bit_prob(int ell, unsigned prefix, int bit) const;
    // ln(P(X_ell=0|prefix) / P(X_ell=1|prefix)), clamped to +-745.
    double prior_llr(int ell, unsigned prefix) const;
    // Mass of the residue class (lambda mod 2^ell == res); ell in 0..r (ell=0: total).
    double coset_mass(int ell, unsigned res) const;
    // PMF of the transmitted symbol x = lambda mod 2^r folded into (-2^{r-1}, 2^{r-1}].
    std::vector<double> folded() const;  // index i corresponds to value lo_fold + i

    static int label_bit(int lambda, int ell, int r);

private:
    friend DiscreteGaussianPmf discrete_gaussian_pmf(const DiscreteGaussianSpec&, double);
    std::vector<std::vector<double>> mass_;  // mass_[ell][res], ell = 0..r
};

// Builds the PMF; refuses (std::invalid_argument, message names the required
// support_radius) if the truncated mass is >= 1e-12 of the total.
DiscreteGaussianPmf discrete_gaussian_pmf(const DiscreteGaussianSpec& spec, double center = 0.0);

// Smallest support_radius whose truncation loss is < 1e-12.
int required_support_radius(double sigma_s, double center = 0.0);

}  // namespace pl
