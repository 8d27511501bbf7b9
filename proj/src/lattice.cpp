#include "rdlattice/lattice.hpp"

#include <algorithm>
#include <limits>

namespace rdlattice {

LatticeField d_plus(const LatticeField& f, TruncationPolicy policy) {
    const int M = f.lattice.M;
    const double h = f.lattice.h;
    LatticeField out = LatticeField::zeros(f.lattice);
    for (int m = 0; m < M; ++m) out[m] = (f[m + 1] - f[m]) / h;
    out[M] = (f.right_ghost(policy) - f[M]) / h;
    return out;
}

LatticeField d_minus(const LatticeField& f) {
    const int M = f.lattice.M;
    const double h = f.lattice.h;
    LatticeField out = LatticeField::zeros(f.lattice);
    out[0] = 0.0;  // virtual f(-h) = f(0)
    for (int m = 1; m <= M; ++m) out[m] = (f[m] - f[m - 1]) / h;
    return out;
}

LatticeField laplacian(const LatticeField& f, TruncationPolicy policy) {
    const int M = f.lattice.M;
    const double h2 = f.lattice.h * f.lattice.h;
    LatticeField out = LatticeField::zeros(f.lattice);
    out[0] = (f[1] - f[0]) / h2;  // virtual f(-h) = f(0)
    for (int m = 1; m < M; ++m) out[m] = (f[m + 1] - 2.0 * f[m] + f[m - 1]) / h2;
    out[M] = (f.right_ghost(policy) - 2.0 * f[M] + f[M - 1]) / h2;
    return out;
}

LatticeField shift_forward(const LatticeField& f, TruncationPolicy policy) {
    const int M = f.lattice.M;
    LatticeField out = LatticeField::zeros(f.lattice);
    for (int m = 0; m < M; ++m) out[m] = f[m + 1];
    out[M] = f.right_ghost(policy);
    return out;
}

LatticeField shift_backward(const LatticeField& f) {
    const int M = f.lattice.M;
    LatticeField out = LatticeField::zeros(f.lattice);
    out[0] = f[0];
    for (int m = 1; m <= M; ++m) out[m] = f[m - 1];
    return out;
}

double lp_norm(const LatticeField& f, double p) {
    if (std::isinf(p)) return f.sup_abs();
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(f.lattice.h * acc, 1.0 / p);
}

double inner_product(const LatticeField& f, const LatticeField& g) {
    require_same_lattice(f, g);
    double acc = 0.0;
    for (int m = 0; m <= f.lattice.M; ++m) acc += f[m] * g[m];
    return f.lattice.h * acc;
}

double integral_from(const LatticeField& f, int first_index) {
    double acc = 0.0;
    for (int m = std::max(first_index, 0); m <= f.lattice.M; ++m) acc += f[m];
    return f.lattice.h * acc;
}

}  // namespace rdlattice
