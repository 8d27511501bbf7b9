#include "rdlattice/besov.hpp"

#include <algorithm>
#include <cmath>

namespace rdlattice {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

IndexedField to_indexed(const LatticeField& f) { return IndexedField{f.lattice.h, 0, f.values}; }

double lp_norm(const IndexedField& f, double p) {
    if (std::isinf(p)) {
        double s = 0.0;
        for (double v : f.values) s = std::max(s, std::abs(v));
        return s;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(f.h * acc, 1.0 / p);
}

TorusGrid recommended_torus_grid(double h, int support_length) {
    return TorusGrid(h, std::max(64, 8 * support_length));
}

std::vector<std::complex<double>> dft(const IndexedField& f, const TorusGrid& grid) {
    if (grid.Q < 2 * f.size())
        throw std::invalid_argument("dft: torus grid too coarse for the field support (aliasing)");
    std::vector<std::complex<double>> out(grid.Q);
    for (int q = 0; q < grid.Q; ++q) {
        const double xi = grid.xi(q);
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < f.size(); ++k) {
            const double z = (f.first + k) * f.h;
            acc += std::polar(f.values[k], z * xi);
        }
        out[q] = f.h * acc;
    }
    return out;
}

std::vector<std::complex<double>> dft(const LatticeField& f, const TorusGrid& grid) {
    return dft(to_indexed(f), grid);
}

IndexedField idft(const std::vector<std::complex<double>>& g, const TorusGrid& grid, int first,
                  int count) {
    if (static_cast<int>(g.size()) != grid.Q)
        throw std::invalid_argument("idft: sample count does not match the torus grid");
    IndexedField out{grid.h, first, std::vector<double>(count, 0.0)};
    for (int k = 0; k < count; ++k) {
        const double z = (first + k) * grid.h;
        std::complex<double> acc(0.0, 0.0);
        for (int q = 0; q < grid.Q; ++q) acc += g[q] * std::polar(1.0, -z * grid.xi(q));
        out.values[k] = acc.real() / (grid.h * grid.Q);
    }
    return out;
}

namespace {

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace

double bump_chi(double xi) {
    const double u = std::abs(xi);
    if (u <= 1.0) return 1.0;
    if (u >= 4.0 / 3.0) return 0.0;
    return smoothstep(4.0 - 3.0 * u);
}

double bump_level(int j, double xi) {
    if (j == -1) return bump_chi(xi);
    return bump_chi(std::ldexp(xi, -(j + 1))) - bump_chi(std::ldexp(xi, -j));
}

int DyadicPartition::top_level(double h) {
    const double edge = kPi / h;
    if (4.0 / 3.0 > edge)
        throw std::invalid_argument("dyadic partition: mesh too coarse for the base bump");
    int j = 0;
    while (std::ldexp(8.0 / 3.0, j) <= edge) ++j;
    return j;
}

DyadicPartition::DyadicPartition(double mesh) : h(mesh), J(top_level(mesh)) {}

double DyadicPartition::phi(int j, double xi) const {
    if (j < -1 || j > J) throw std::invalid_argument("dyadic partition: level out of range");
    if (j < J) return bump_level(j, xi);
    return 1.0 - bump_chi(std::ldexp(xi, -J));
}

BesovAnalyzer::BesovAnalyzer(double h, double kernel_tol) : h_(h), partition_(h) {
    // Kernel of block j: (1/2pi) int_{T_h} cos(m h xi) phi_j^h(xi) dxi.
    // In the angle theta = h xi the integrand is smooth and periodic, so
    // uniform trapezoid nodes converge spectrally; cos(m theta) is
    // advanced by a two-term recurrence.
    //
    // Every level shares one quadrature grid and one truncation range.
    // Because the levels sum to 1 at each node, the stored kernels then
    // sum to the exact discrete delta in floating point, and block sums
    // reconstruct the field to roundoff no matter where the slowly
    // decaying individual tails are cut. kernel_tol only controls the
    // accuracy of single blocks.
    const double gevrey = 1.1;  // measured decay |K(x)| ~ exp(-gevrey sqrt(x)) for the base bump
    const double x_cut = std::pow(std::log(1.0 / kernel_tol) / gevrey, 2);
    const int range_cap = static_cast<int>(std::ceil(x_cut / h_)) + 64;
    int q_nodes = 4 * (range_cap + 32);
    if (q_nodes % 2 != 0) ++q_nodes;

    const int levels = partition_.J + 2;
    std::vector<std::vector<double>> weight(levels, std::vector<double>(q_nodes));
    std::vector<double> cos_prev(q_nodes), cos_curr(q_nodes), step(q_nodes);
    for (int q = 0; q < q_nodes; ++q) {
        const double theta = -kPi + q * (2.0 * kPi / q_nodes);
        for (int j = -1; j <= partition_.J; ++j) weight[j + 1][q] = partition_.phi(j, theta / h_);
        step[q] = std::cos(theta);
        cos_prev[q] = 1.0;
        cos_curr[q] = step[q];
    }

    kernels_.assign(levels, {});
    for (auto& row : kernels_) row.reserve(range_cap + 1);
    const double scale = 1.0 / (h_ * q_nodes);
    std::vector<double> peak(levels, 0.0);
    std::vector<int> keep(levels, 0);
    for (int m = 0; m <= range_cap; ++m) {
        for (int j = 0; j < levels; ++j) {
            double acc = 0.0;
            const double* w = weight[j].data();
            if (m == 0) {
                for (int q = 0; q < q_nodes; ++q) acc += w[q];
            } else {
                for (int q = 0; q < q_nodes; ++q) acc += w[q] * cos_curr[q];
            }
            const double value = scale * acc;
            kernels_[j].push_back(value);
            peak[j] = std::max(peak[j], std::abs(value));
            if (std::abs(value) >= kernel_tol * peak[j]) keep[j] = m;
        }
        if (m >= 1) {
            for (int q = 0; q < q_nodes; ++q) {
                const double c = 2.0 * step[q] * cos_curr[q] - cos_prev[q];
                cos_prev[q] = cos_curr[q];
                cos_curr[q] = c;
            }
        }
    }
    const int shared = std::max(64, *std::max_element(keep.begin(), keep.end()));
    for (auto& row : kernels_) row.resize(std::min<std::size_t>(row.size(), shared + 1));
}

IndexedField BesovAnalyzer::block(const IndexedField& f, int j) const {
    if (j < -1 || j > partition_.J) throw std::invalid_argument("block: level out of range");
    if (f.h != h_) throw std::invalid_argument("block: field mesh does not match the analyzer");
    const std::vector<double>& kernel = kernels_[j + 1];
    const int range = static_cast<int>(kernel.size()) - 1;
    IndexedField out{h_, f.first - range, std::vector<double>(f.size() + 2 * range, 0.0)};
    for (int k = 0; k < f.size(); ++k) {
        const double fv = h_ * f.values[k];
        if (fv == 0.0) continue;
        const int center = k + range;  // output offset of the source node
        out.values[center] += fv * kernel[0];
        for (int d = 1; d <= range; ++d) {
            const double kv = fv * kernel[d];
            out.values[center - d] += kv;
            out.values[center + d] += kv;
        }
    }
    return out;
}

IndexedField BesovAnalyzer::block(const LatticeField& f, int j) const { return block(to_indexed(f), j); }

double BesovAnalyzer::block_lp(const IndexedField& f, int j, double p) const {
    return lp_norm(block(f, j), p);
}

double BesovAnalyzer::besov_norm(const IndexedField& f, const BesovSpec& spec) const {
    spec.validate();
    if (std::isinf(spec.q)) {
        double best = 0.0;
        for (int j = -1; j <= partition_.J; ++j)
            best = std::max(best, std::pow(2.0, j * spec.alpha) * block_lp(f, j, spec.p));
        return best;
    }
    double acc = 0.0;
    for (int j = -1; j <= partition_.J; ++j)
        acc += std::pow(std::pow(2.0, j * spec.alpha) * block_lp(f, j, spec.p), spec.q);
    return std::pow(acc, 1.0 / spec.q);
}

double BesovAnalyzer::besov_norm(const LatticeField& f, const BesovSpec& spec) const {
    return besov_norm(to_indexed(f), spec);
}

double spacetime_besov_distance(const std::vector<LatticeField>& traj_a,
                                const std::vector<LatticeField>& traj_b, double dt,
                                double bar_alpha, const BesovSpec& spec, double r,
                                const BesovAnalyzer& analyzer) {
    if (traj_a.size() != traj_b.size() || traj_a.size() < 2)
        throw std::invalid_argument("spacetime distance: trajectories need a common grid of >= 2 frames");
    if (!(r >= 1.0)) throw std::invalid_argument("spacetime distance: r must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("spacetime distance: dt must be positive");

    const int frames = static_cast<int>(traj_a.size());
    std::vector<IndexedField> diff(frames);
    for (int i = 0; i < frames; ++i) {
        require_same_lattice(traj_a[i], traj_b[i]);
        IndexedField d = to_indexed(traj_a[i]);
        for (int k = 0; k < d.size(); ++k) d.values[k] -= traj_b[i].values[k];
        diff[i] = std::move(d);
    }

    // L^r-in-time Besov norm, left-endpoint rule over [0, T).
    double time_acc = 0.0;
    for (int i = 0; i < frames - 1; ++i)
        time_acc += std::pow(analyzer.besov_norm(diff[i], spec), r) * dt;
    const double term_norm = std::pow(time_acc, 1.0 / r);

    // Increment term over grid shifts s = j dt < 1.
    const int max_shift = std::min(frames - 1, static_cast<int>(std::floor((1.0 - 1e-12) / dt)));
    double shift_acc = 0.0;
    double smallest_shift_acc = 0.0;
    for (int j = 1; j <= max_shift; ++j) {
        const double s = j * dt;
        const double kernel = std::pow(s, -(1.0 + r * bar_alpha));
        double inner = 0.0;
        for (int i = 0; i + j < frames; ++i) {
            IndexedField inc = diff[i + j];
            for (int k = 0; k < inc.size(); ++k) inc.values[k] -= diff[i].values[k];
            inner += std::pow(analyzer.besov_norm(inc, spec), r) * dt;
        }
        const double contribution = inner * kernel * dt;
        shift_acc += contribution;
        if (j == 1) smallest_shift_acc = contribution;
    }
    if (max_shift >= 4 && shift_acc > 0.0 && smallest_shift_acc > 0.5 * shift_acc)
        throw std::domain_error(
            "spacetime distance: increment sum dominated by the smallest shift (divergent "
            "bar_alpha/r combination)");

    return term_norm + std::pow(shift_acc, 1.0 / r);
}

}  // namespace rdlattice
