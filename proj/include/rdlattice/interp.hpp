#pragma once

#include <functional>
#include <vector>

#include "rdlattice/besov.hpp"
#include "rdlattice/lattice.hpp"

namespace rdlattice {

/// Piecewise-constant function on [0, (M+1) h): value f(z) on each cell
/// [z, z+h). This is the continuum embedding of a lattice field.
struct PiecewiseConstant {
    double h = 0.0;
    std::vector<double> values;

    double eval(double x) const {
        if (x < 0.0) return 0.0;
        const std::size_t cell = static_cast<std::size_t>(x / h);
        return cell < values.size() ? values[cell] : 0.0;
    }
    double integral() const {
        double acc = 0.0;
        for (double v : values) acc += v;
        return h * acc;
    }
};

/// Cell-constant extension of a lattice field.
PiecewiseConstant extend(const LatticeField& f);

/// Cell-average projection of a continuum function onto the lattice,
/// (1/h) int_z^{z+h} g, with composite Simpson panels per cell.
LatticeField discretize(const std::function<double(double)>& g, const Lattice& lattice,
                        int panels_per_cell = 16);

/// Exact cell averages of a piecewise-constant function (breakpoints are
/// honored, so discretize(extend(f)) reproduces f identically).
LatticeField discretize(const PiecewiseConstant& g, const Lattice& lattice);

/// Same projection from samples on a nested fine lattice (at least 16
/// samples per coarse cell).
LatticeField discretize_samples(const LatticeField& fine, const Lattice& coarse);

/// Residual of the extension/discretization adjointness
///   | int g E_h(f) dx  -  h sum D_h(g) f |,
/// with the two sides evaluated by independent quadratures.
double duality_residual(const LatticeField& f, const std::function<double(double)>& g);

/// Resample a coarse field onto a nested finer lattice through its
/// piecewise-constant extension. Throws when the meshes do not nest.
LatticeField resample_to_fine(const LatticeField& coarse, const Lattice& fine);

/// Distance between fields at nested meshes: both are extended and
/// compared on the finer lattice, in lattice L^p (besov = false) or in
/// the Besov norm of the supplied spec (an analyzer for the fine mesh
/// is required in that case).
double intergrid_distance(const LatticeField& f_coarse, const LatticeField& f_fine, double p);
double intergrid_distance_besov(const LatticeField& f_coarse, const LatticeField& f_fine,
                                const BesovSpec& spec, const BesovAnalyzer& fine_analyzer);

}  // namespace rdlattice
