#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rdlattice {

/// Uniform half-line lattice: nodes x_m = m*h for m = 0..M, with
/// x_0 = 0 the boundary node.
struct Lattice {
    double h = 0.0;
    int M = 0;

    Lattice() = default;
    Lattice(double mesh, int interior_count) : h(mesh), M(interior_count) {
        if (!(h > 0.0)) throw std::invalid_argument("lattice: mesh h must be positive");
        if (M < 2) throw std::invalid_argument("lattice: need at least M=2");
    }

    double x(int m) const { return m * h; }
    int size() const { return M + 1; }
    double extent() const { return M * h; }

    bool operator==(const Lattice& other) const { return h == other.h && M == other.M; }
    bool operator!=(const Lattice& other) const { return !(*this == other); }
};

/// How operators obtain the virtual node x_{M+1} at the truncated
/// right edge. The left edge never needs a virtual node: the backward
/// difference at x_0 reuses the boundary value itself.
enum class TruncationPolicy {
    ZeroExtension,
    LastValueExtension,
};

inline const char* to_string(TruncationPolicy p) {
    return p == TruncationPolicy::ZeroExtension ? "zero" : "last";
}

/// Real-valued function sampled on a Lattice (one value per node).
struct LatticeField {
    Lattice lattice;
    std::vector<double> values;

    LatticeField() = default;
    LatticeField(Lattice lat, std::vector<double> vals) : lattice(lat), values(std::move(vals)) {
        if (static_cast<int>(values.size()) != lattice.size())
            throw std::invalid_argument("lattice field: values length must be M+1");
    }

    static LatticeField zeros(const Lattice& lat) {
        return LatticeField(lat, std::vector<double>(lat.size(), 0.0));
    }

    static LatticeField from_function(const Lattice& lat, const std::function<double(double)>& f) {
        std::vector<double> v(lat.size());
        for (int m = 0; m <= lat.M; ++m) v[m] = f(lat.x(m));
        return LatticeField(lat, std::move(v));
    }

    double& operator[](int m) { return values[m]; }
    double operator[](int m) const { return values[m]; }
    int size() const { return lattice.size(); }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double sup_abs() const {
        double s = 0.0;
        for (double v : values) s = std::max(s, std::abs(v));
        return s;
    }

    double min() const {
        double s = values[0];
        for (double v : values) s = std::min(s, v);
        return s;
    }

    double max() const {
        double s = values[0];
        for (double v : values) s = std::max(s, v);
        return s;
    }

    // Value of the virtual node x_{M+1} under a truncation policy.
    double right_ghost(TruncationPolicy policy) const {
        return policy == TruncationPolicy::ZeroExtension ? 0.0 : values[lattice.M];
    }
};

inline void require_same_lattice(const LatticeField& f, const LatticeField& g) {
    if (f.lattice != g.lattice)
        throw std::invalid_argument("lattice fields live on different lattices");
}

/// Forward divided difference (f(x+h)-f(x))/h; the right edge uses the
/// virtual node supplied by the truncation policy.
LatticeField d_plus(const LatticeField& f, TruncationPolicy policy = TruncationPolicy::ZeroExtension);

/// Backward divided difference (f(x)-f(x-h))/h; at x_0 the virtual
/// value f(-h) is taken equal to f(0), so the result there is 0.
LatticeField d_minus(const LatticeField& f);

/// Symmetric second difference (f(x+h)-2f(x)+f(x-h))/h^2; edges use the
/// same virtual-node conventions as d_plus/d_minus.
LatticeField laplacian(const LatticeField& f, TruncationPolicy policy = TruncationPolicy::ZeroExtension);

/// Shift f(.+h) (right edge per policy) and f(.-h) (left edge reuses f(0)).
LatticeField shift_forward(const LatticeField& f, TruncationPolicy policy = TruncationPolicy::ZeroExtension);
LatticeField shift_backward(const LatticeField& f);

/// h-weighted L^p norm, (h sum |f|^p)^(1/p); pass p = infinity for the sup norm.
double lp_norm(const LatticeField& f, double p);

/// h-weighted inner product h sum f(z) g(z) over the stored range m = 0..M.
double inner_product(const LatticeField& f, const LatticeField& g);

/// h-weighted sums over index subranges (used by the summation-by-parts
/// identities, which distinguish m >= 1 from m >= 0).
double integral_from(const LatticeField& f, int first_index);
inline double integral(const LatticeField& f) { return integral_from(f, 0); }

}  // namespace rdlattice
