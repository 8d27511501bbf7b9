#include "rdlattice/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rdlattice {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

int kernel_quadrature_nodes(double t, double h, int n_max) {
    const double oscillation = std::sqrt(std::max(4.0 * t / (h * h), 0.0));
    int q = std::max(64, 8 * static_cast<int>(std::ceil(oscillation)) + 8 * std::abs(n_max) + 8);
    if (q % 2 != 0) ++q;
    return q;
}

std::vector<double> hd_row(double t, double h, int n_max) {
    if (t < 0.0) throw std::invalid_argument("hd: time must be nonnegative");
    std::vector<double> row(n_max + 1, 0.0);
    if (t == 0.0) {
        row[0] = 1.0 / h;
        return row;
    }
    // In the angle theta = h*xi the integral becomes
    //   (1/(2 pi h)) int_{-pi}^{pi} cos(n theta) exp(-(4t/h^2) sin^2(theta/2)) dtheta,
    // a smooth periodic integrand, so uniform trapezoid nodes converge
    // spectrally. cos(n theta) is advanced by a two-term recurrence.
    const int q_nodes = kernel_quadrature_nodes(t, h, n_max);
    const double width = 4.0 * t / (h * h);
    const double dtheta = 2.0 * kPi / q_nodes;
    for (int q = 0; q < q_nodes; ++q) {
        const double theta = -kPi + q * dtheta;
        const double s = std::sin(0.5 * theta);
        const double weight = std::exp(-width * s * s);
        const double c1 = std::cos(theta);
        double cos_prev = 1.0;  // cos(0)
        double cos_curr = c1;   // cos(theta)
        row[0] += weight;
        if (n_max >= 1) row[1] += weight * c1;
        for (int n = 2; n <= n_max; ++n) {
            const double cos_next = 2.0 * c1 * cos_curr - cos_prev;
            row[n] += weight * cos_next;
            cos_prev = cos_curr;
            cos_curr = cos_next;
        }
    }
    const double scale = 1.0 / (h * q_nodes);
    for (double& v : row) v *= scale;
    return row;
}

double hd(double t, long n, double h) {
    const long na = std::labs(n);
    if (t < 0.0) throw std::invalid_argument("hd: time must be nonnegative");
    if (t == 0.0) return na == 0 ? 1.0 / h : 0.0;
    const int q_nodes = kernel_quadrature_nodes(t, h, static_cast<int>(na));
    const double width = 4.0 * t / (h * h);
    const double dtheta = 2.0 * kPi / q_nodes;
    double acc = 0.0;
    for (int q = 0; q < q_nodes; ++q) {
        const double theta = -kPi + q * dtheta;
        const double s = std::sin(0.5 * theta);
        acc += std::cos(na * theta) * std::exp(-width * s * s);
    }
    return acc / (h * q_nodes);
}

double gd(double t, int n, int m, double h) {
    if (n < 0 || m < 0) throw std::invalid_argument("gd: node indices must be nonnegative");
    return hd(t, n - m, h) - hd(t, n + m, h);
}

const std::vector<double>& KernelCache::row(double t) {
    auto it = rows_.find(t);
    if (it == rows_.end()) it = rows_.emplace(t, hd_row(t, h_, n_max_)).first;
    return it->second;
}

namespace {

void check_tail(const LatticeField& f, double tail_tol, const char* who) {
    const double sup = f.sup_abs();
    if (sup == 0.0) return;
    const int M = f.lattice.M;
    const double tail = std::max(std::abs(f[M]), std::abs(f[M - 1]));
    if (tail > tail_tol * sup)
        throw TruncationError(std::string(who) + ": field does not decay before the truncated edge");
}

}  // namespace

LatticeField semigroup_apply(const LatticeField& f, double t, double tail_tol) {
    check_tail(f, tail_tol, "semigroup_apply");
    const int M = f.lattice.M;
    const double h = f.lattice.h;
    const std::vector<double> row = hd_row(t, h, M);
    LatticeField out = LatticeField::zeros(f.lattice);
    for (int n = 0; n <= M; ++n) {
        double acc = 0.0;
        for (int m = 0; m <= M; ++m) acc += row[std::abs(n - m)] * f[m];
        out[n] = h * acc;
    }
    return out;
}

LatticeField half_line_semigroup_apply(const LatticeField& f, double t, double tail_tol) {
    check_tail(f, tail_tol, "half_line_semigroup_apply");
    const int M = f.lattice.M;
    const double h = f.lattice.h;
    const std::vector<double> row = hd_row(t, h, 2 * M);
    LatticeField out = LatticeField::zeros(f.lattice);
    for (int n = 0; n <= M; ++n) {
        double acc = 0.0;
        for (int m = 1; m <= M; ++m) acc += (row[std::abs(n - m)] - row[n + m]) * f[m];
        out[n] = h * acc;
    }
    if (t > 0.0) out[0] = 0.0;
    return out;
}

LatticeField boundary_solution_u(const BoundaryPath& psi, double t, const Lattice& lattice,
                                 KernelCache* cache) {
    if (t < 0.0 || t > psi.horizon() + 1e-12)
        throw std::invalid_argument("boundary_solution_u: t outside the path horizon");
    const double dt = psi.dt();
    const double steps_real = t / dt;
    const int j_t = static_cast<int>(std::llround(steps_real));
    if (std::abs(steps_real - j_t) > 1e-9)
        throw std::invalid_argument("boundary_solution_u: t must lie on the path grid");

    const int M = lattice.M;
    const double h = lattice.h;
    LatticeField u = LatticeField::zeros(lattice);
    if (j_t == 0) {
        u[0] = psi.values[0];
        return u;
    }

    KernelCache local(h, M + 1);
    KernelCache& rows = cache ? *cache : local;
    if (cache && (cache->h() != h || cache->n_max() < M + 1))
        throw std::invalid_argument("boundary_solution_u: incompatible kernel cache");

    // (D^- + D^+) hd(s, x_m) = (hd(s, m+1) - hd(s, m-1)) / h.
    auto accumulate = [&](const std::vector<double>& row, double factor) {
        for (int m = 1; m <= M; ++m) u[m] -= factor * (row[m + 1] - row[m - 1]) / h;
    };

    // Composite trapezoid over tau = t_0..t_{j_t-1}; the final subinterval
    // [t - dt, t] uses the kernel at lag dt/2 against the averaged psi.
    if (j_t >= 2) {
        for (int i = 0; i < j_t; ++i) {
            const double lag = t - psi.times[i];
            const double weight = (i == 0 || i == j_t - 1) ? 0.5 * dt : dt;
            accumulate(rows.row(lag), weight * psi.values[i]);
        }
    }
    accumulate(rows.row(0.5 * dt), dt * 0.5 * (psi.values[j_t - 1] + psi.values[j_t]));

    u[0] = psi.values[j_t];
    return u;
}

void write_kernel_csv(const std::string& file, double h, const std::vector<double>& times, int n_max) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_kernel_csv: cannot open " + file);
    out << "t,n,value\n";
    char line[96];
    for (double t : times) {
        const std::vector<double> row = hd_row(t, h, n_max);
        for (int n = 0; n <= n_max; ++n) {
            std::snprintf(line, sizeof line, "%.17g,%d,%.17g\n", t, n, row[n]);
            out << line;
        }
    }
}

}  // namespace rdlattice
