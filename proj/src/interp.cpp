#include "rdlattice/interp.hpp"

#include <cmath>

namespace rdlattice {

PiecewiseConstant extend(const LatticeField& f) { return PiecewiseConstant{f.lattice.h, f.values}; }

LatticeField discretize(const std::function<double(double)>& g, const Lattice& lattice,
                        int panels_per_cell) {
    if (panels_per_cell < 16 || panels_per_cell % 2 != 0)
        throw std::invalid_argument("discretize: need an even panel count >= 16 per cell");
    LatticeField out = LatticeField::zeros(lattice);
    const double h = lattice.h;
    const double dx = h / panels_per_cell;
    for (int m = 0; m <= lattice.M; ++m) {
        const double z = lattice.x(m);
        double acc = g(z) + g(z + h);
        for (int i = 1; i < panels_per_cell; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * g(z + i * dx);
        out[m] = acc * dx / (3.0 * h);
    }
    return out;
}

LatticeField discretize(const PiecewiseConstant& g, const Lattice& lattice) {
    LatticeField out = LatticeField::zeros(lattice);
    for (int m = 0; m <= lattice.M; ++m) {
        const double lo = lattice.x(m);
        const double hi = lo + lattice.h;
        // Walk the source cells overlapping [lo, hi).
        double acc = 0.0;
        std::size_t cell = static_cast<std::size_t>(std::max(lo, 0.0) / g.h);
        double cursor = lo;
        while (cursor < hi - 1e-15 && cell < g.values.size()) {
            const double cell_end = (cell + 1) * g.h;
            const double upto = std::min(hi, cell_end);
            acc += g.values[cell] * (upto - cursor);
            cursor = upto;
            ++cell;
        }
        out[m] = acc / lattice.h;
    }
    return out;
}

LatticeField discretize_samples(const LatticeField& fine, const Lattice& coarse) {
    const double ratio_real = coarse.h / fine.lattice.h;
    const int ratio = static_cast<int>(std::llround(ratio_real));
    if (ratio < 16 || std::abs(ratio_real - ratio) > 1e-9)
        throw std::invalid_argument("discretize_samples: need >= 16 nested samples per cell");
    LatticeField out = LatticeField::zeros(coarse);
    for (int m = 0; m <= coarse.M; ++m) {
        double acc = 0.0;
        for (int i = 0; i < ratio; ++i) {
            const int idx = m * ratio + i;
            acc += idx <= fine.lattice.M ? fine[idx] : 0.0;
        }
        out[m] = acc / ratio;
    }
    return out;
}

namespace {

// 5-point Gauss-Legendre on [a, b]; exact through degree 9, and in
// particular independent of the Simpson panels used on the other side
// of the duality identity.
double gauss5(const std::function<double(double)>& f, double a, double b) {
    static const double node[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
    static const double weight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += weight[i] * f(mid + half * node[i]);
    return half * acc;
}

}  // namespace

double duality_residual(const LatticeField& f, const std::function<double(double)>& g) {
    const Lattice& lat = f.lattice;
    double lhs = 0.0;  // int g E_h(f): cellwise Gauss against the constant value
    for (int m = 0; m <= lat.M; ++m)
        lhs += f[m] * gauss5(g, lat.x(m), lat.x(m) + lat.h);
    const LatticeField g_cells = discretize(g, lat);
    double rhs = 0.0;
    for (int m = 0; m <= lat.M; ++m) rhs += g_cells[m] * f[m];
    rhs *= lat.h;
    return std::abs(lhs - rhs);
}

LatticeField resample_to_fine(const LatticeField& coarse, const Lattice& fine) {
    const double ratio_real = coarse.lattice.h / fine.h;
    const int ratio = static_cast<int>(std::llround(ratio_real));
    if (ratio < 1 || std::abs(ratio_real - ratio) > 1e-9)
        throw std::invalid_argument("resample_to_fine: meshes are not nested");
    LatticeField out = LatticeField::zeros(fine);
    for (int m = 0; m <= fine.M; ++m) {
        const int cell = m / ratio;
        out[m] = cell <= coarse.lattice.M ? coarse[cell] : 0.0;
    }
    return out;
}

namespace {

std::pair<LatticeField, LatticeField> on_common_fine(const LatticeField& f_coarse,
                                                     const LatticeField& f_fine) {
    if (f_fine.lattice.h > f_coarse.lattice.h)
        throw std::invalid_argument("intergrid distance: second field must be the finer one");
    const LatticeField a = resample_to_fine(f_coarse, f_fine.lattice);
    return {a, f_fine};
}

}  // namespace

double intergrid_distance(const LatticeField& f_coarse, const LatticeField& f_fine, double p) {
    auto [a, b] = on_common_fine(f_coarse, f_fine);
    for (int m = 0; m <= b.lattice.M; ++m) a[m] -= b[m];
    return lp_norm(a, p);
}

double intergrid_distance_besov(const LatticeField& f_coarse, const LatticeField& f_fine,
                                const BesovSpec& spec, const BesovAnalyzer& fine_analyzer) {
    if (fine_analyzer.h() != f_fine.lattice.h)
        throw std::invalid_argument("intergrid distance: analyzer mesh does not match the fine field");
    auto [a, b] = on_common_fine(f_coarse, f_fine);
    for (int m = 0; m <= b.lattice.M; ++m) a[m] -= b[m];
    return fine_analyzer.besov_norm(a, spec);
}

}  // namespace rdlattice
