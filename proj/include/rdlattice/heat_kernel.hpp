#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rdlattice/boundary.hpp"
#include "rdlattice/lattice.hpp"

namespace rdlattice {

/// Signals that a field does not decay enough before the truncated
/// right edge for a convolution against the kernel to be trusted.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Number of quadrature nodes for the frequency integral behind the
/// kernel: grows with the oscillation count of the integrand (set by
/// the diffusion width sqrt(4 t / h^2)) and with the node index.
int kernel_quadrature_nodes(double t, double h, int n_max);

/// Lattice heat kernel at node index n: the value of the fundamental
/// solution of d/dt = Delta_h started from the discrete delta (1/h at
/// node 0), evaluated by periodic trapezoid quadrature of its Fourier
/// representation over [-pi/h, pi/h]. Exact delta at t = 0.
double hd(double t, long n, double h);

/// Kernel values for n = 0..n_max computed in one quadrature pass
/// (values at negative n follow by symmetry).
std::vector<double> hd_row(double t, double h, int n_max);

/// Half-line Dirichlet kernel via odd reflection:
///   gd(t,n,m) = hd(t, n-m) - hd(t, n+m).
double gd(double t, int n, int m, double h);

/// Cache of kernel rows keyed by time, shared across the nodes of a
/// convolution. Read-mostly; fill is serialized by the caller.
class KernelCache {
  public:
    KernelCache(double h, int n_max) : h_(h), n_max_(n_max) {}

    const std::vector<double>& row(double t);
    double h() const { return h_; }
    int n_max() const { return n_max_; }

  private:
    double h_;
    int n_max_;
    std::map<double, std::vector<double>> rows_;
};

/// Full-line heat semigroup applied to a field supported on the stored
/// range (zero outside): (e^{t Delta_h} f)(x) = h sum_y hd(t, x-y) f(y).
/// Throws TruncationError when the field tail at the right edge exceeds
/// tail_tol times the sup (the truncated convolution would be lossy).
LatticeField semigroup_apply(const LatticeField& f, double t, double tail_tol = 1e-10);

/// Half-line semigroup with zero boundary data, using the odd-reflection
/// kernel; the boundary node of the result is exactly 0 for t > 0.
LatticeField half_line_semigroup_apply(const LatticeField& f, double t, double tail_tol = 1e-10);

/// Boundary-driven solution of the lattice heat equation with zero
/// initial data and Dirichlet data psi at the boundary node:
///   u(t,x) = -int_0^t (D^- + D^+) hd(t-tau, x) psi(tau) dtau,  x > 0,
///   u(t,0) = psi(t).
/// The time integral uses composite trapezoid on the path grid; the last
/// subinterval evaluates the kernel difference at its midpoint so the
/// kernel is never sampled at lag zero. t must be a grid time of psi.
LatticeField boundary_solution_u(const BoundaryPath& psi, double t, const Lattice& lattice,
                                 KernelCache* cache = nullptr);

void write_kernel_csv(const std::string& file, double h, const std::vector<double>& times, int n_max);

}  // namespace rdlattice
