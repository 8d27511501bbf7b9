#pragma once

#include <complex>
#include <vector>

#include "rdlattice/lattice.hpp"

namespace rdlattice {

/// Regularity / integrability indices of a lattice Besov norm.
/// p and q accept infinity.
struct BesovSpec {
    double alpha = 0.0;
    double p = 2.0;
    double q = 2.0;

    void validate() const {
        if (!(p >= 1.0) || !(q >= 1.0))
            throw std::invalid_argument("besov spec: p and q must be >= 1 (or infinity)");
    }
};

/// Lattice function on an arbitrary index window [first, first+len):
/// Littlewood-Paley blocks of half-line fields spill below index 0,
/// so the analysis works on this wider type.
struct IndexedField {
    double h = 0.0;
    int first = 0;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    int last() const { return first + size() - 1; }
    double at_index(int n) const {
        const int k = n - first;
        return (k >= 0 && k < size()) ? values[k] : 0.0;
    }
};

IndexedField to_indexed(const LatticeField& f);
double lp_norm(const IndexedField& f, double p);

/// Symmetric frequency grid on [-pi/h, pi/h] with Q uniform samples,
/// xi_q = -pi/h + q * 2 pi / (h Q).
struct TorusGrid {
    double h = 0.0;
    int Q = 0;

    TorusGrid(double mesh, int samples) : h(mesh), Q(samples) {
        if (!(h > 0.0) || Q < 4) throw std::invalid_argument("torus grid: need h > 0 and Q >= 4");
    }
    double xi(int q) const { return (-3.14159265358979323846 + q * 2.0 * 3.14159265358979323846 / Q) / h; }
};

/// Grid sized for a field of the given support length (Q = 8x support).
TorusGrid recommended_torus_grid(double h, int support_length);

/// F_h(f)(xi) = h sum_z e^{i z xi} f(z) sampled at the grid frequencies.
/// Rejects grids too coarse for the field support (aliased round trip).
std::vector<std::complex<double>> dft(const IndexedField& f, const TorusGrid& grid);
std::vector<std::complex<double>> dft(const LatticeField& f, const TorusGrid& grid);

/// Inverse transform (1/2pi) int e^{-i z xi} g(xi) dxi by periodic
/// trapezoid, evaluated on the index window [first, first+count).
IndexedField idft(const std::vector<std::complex<double>>& g, const TorusGrid& grid, int first, int count);

/// Smooth dyadic bump functions (fixed once; all norms are relative to
/// this construction): chi = 1 on [-1,1], supported in [-4/3,4/3], glued
/// with the exp(-1/t) smoothstep; level function chi(xi/2^{j+1}) - chi(xi/2^j).
double bump_chi(double xi);
double bump_level(int j, double xi);

/// Dyadic partition of unity on the frequency torus: levels j = -1..J-1
/// are the whole-line bumps, the top level is the exact complement
/// 1 - chi(2^{-J} xi), so the partition sums to one identically.
struct DyadicPartition {
    double h = 0.0;
    int J = 0;

    explicit DyadicPartition(double mesh);
    double phi(int j, double xi) const;

    static int top_level(double h);
};

/// Littlewood-Paley analysis for one mesh: block kernels are built once
/// (inverse transforms of the partition levels, all on one shared
/// quadrature grid and truncation range, so block sums telescope back to
/// the field exactly) and every block is a plain real convolution
/// against them. kernel_tol sets the relative truncation of single
/// kernels. Immutable after construction, safe for concurrent readers.
class BesovAnalyzer {
  public:
    explicit BesovAnalyzer(double h, double kernel_tol = 1e-7);

    double h() const { return h_; }
    int top_level() const { return partition_.J; }
    const DyadicPartition& partition() const { return partition_; }

    IndexedField block(const IndexedField& f, int j) const;
    IndexedField block(const LatticeField& f, int j) const;

    double block_lp(const IndexedField& f, int j, double p) const;
    double besov_norm(const IndexedField& f, const BesovSpec& spec) const;
    double besov_norm(const LatticeField& f, const BesovSpec& spec) const;

    int kernel_range(int j) const { return static_cast<int>(kernels_[j + 1].size()) - 1; }

  private:
    double h_;
    DyadicPartition partition_;
    std::vector<std::vector<double>> kernels_;  // kernels_[j+1][|m|]
};

/// Space-time regularity functional of the difference of two trajectories
/// on a common time grid of spacing dt: the L^r-in-time Besov norm plus
/// the (1/r-rooted) double integral of Besov increments against the
/// kernel s^{-(1+r*bar_alpha)}, discretized with left endpoints over grid
/// shifts s = dt, 2dt, ... < 1. Throws std::domain_error when the shift
/// sum is dominated by its smallest shift (divergent combination).
double spacetime_besov_distance(const std::vector<LatticeField>& traj_a,
                                const std::vector<LatticeField>& traj_b, double dt,
                                double bar_alpha, const BesovSpec& spec, double r,
                                const BesovAnalyzer& analyzer);

}  // namespace rdlattice
