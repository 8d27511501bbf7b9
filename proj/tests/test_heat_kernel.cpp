#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdlattice/heat_kernel.hpp"
#include "rdlattice/solver.hpp"
#include "support/oracles.hpp"

using namespace rdlattice;

TEST_CASE("delta initial data and symmetry") {
    CHECK(hd(0.0, 0, 0.5) == 2.0);
    CHECK(hd(0.0, 3, 0.5) == 0.0);
    for (double t : {0.01, 0.3}) {
        for (int n : {1, 4, 9}) CHECK(hd(t, n, 0.2) == doctest::Approx(hd(t, -n, 0.2)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(hd(-0.1, 0, 0.5), std::invalid_argument);
}

TEST_CASE("kernel values match the continuous-time walk series") {
    // The walk with generator Delta_h has transition density
    // e^{-2t/h^2} I_n(2t/h^2) / h at distance n.
    const double t = 0.1;
    const double h = 0.1;
    const double arg = 2.0 * t / (h * h);
    const std::vector<double> row = hd_row(t, h, 20);
    for (int n = 0; n <= 20; ++n) {
        const double reference = oracles::bessel_i_scaled(n, arg) / h;
        CHECK(std::abs(row[n] - reference) < 1e-10);
    }
}

TEST_CASE("mass and positivity") {
    const double h = 0.1;
    for (double t : {0.01, 0.1, 1.0}) {
        const int spread = static_cast<int>(std::ceil(10.0 * std::sqrt(2.0 * t) / h)) + 64;
        const std::vector<double> row = hd_row(t, h, spread);
        double mass = row[0];
        for (int n = 1; n <= spread; ++n) {
            mass += 2.0 * row[n];
            CHECK(row[n] >= -1e-12);
        }
        CHECK(std::abs(h * mass - 1.0) < 1e-10);
    }
}

TEST_CASE("odd-reflection kernel") {
    const double h = 0.25;
    for (double t : {0.0, 0.05, 0.4}) {
        for (int m : {1, 2, 7}) CHECK(gd(t, 0, m, h) == doctest::Approx(0.0).epsilon(1e-14));
    }
    CHECK(gd(0.0, 3, 3, h) == doctest::Approx(1.0 / h).epsilon(1e-14));

    // Row sums h sum_m gd(t,n,m) are survival probabilities: within [0,1],
    // increasing towards 1 as the start point moves away from the wall.
    const double t = 0.2;
    double previous = 0.0;
    for (int n : {1, 3, 6, 12, 24}) {
        double acc = 0.0;
        for (int m = 1; m <= 400; ++m) acc += gd(t, n, m, h);
        const double row_sum = h * acc;
        CHECK(row_sum >= 0.0);
        CHECK(row_sum <= 1.0 + 1e-12);
        CHECK(row_sum >= previous - 1e-12);
        previous = row_sum;
    }
    CHECK(previous > 0.999);
}

TEST_CASE("semigroup: identity, delta row, matrix exponential oracle") {
    const Lattice lat(0.1, 120);
    const LatticeField f = oracles::random_field(lat, 42, 40, 80);

    const LatticeField same = semigroup_apply(f, 0.0);
    for (int m = 0; m <= lat.M; ++m) CHECK(same[m] == doctest::Approx(f[m]).epsilon(1e-13));

    LatticeField delta = LatticeField::zeros(lat);
    delta[60] = 1.0 / lat.h;
    const double t = 0.03;
    const LatticeField spread = semigroup_apply(delta, t);
    const std::vector<double> row = hd_row(t, lat.h, lat.M);
    for (int m = 0; m <= lat.M; ++m)
        CHECK(spread[m] == doctest::Approx(row[std::abs(m - 60)]).epsilon(1e-12));

    const LatticeField via_matrix = oracles::matrix_exp_apply(f, 0.05);
    const LatticeField via_kernel = semigroup_apply(f, 0.05);
    double worst = 0.0;
    for (int m = 0; m <= lat.M; ++m) worst = std::max(worst, std::abs(via_matrix[m] - via_kernel[m]));
    CHECK(worst < 1e-8);
}

TEST_CASE("semigroup property and mass conservation") {
    const Lattice lat(0.1, 160);
    const LatticeField f = oracles::random_field(lat, 5, 60, 100);
    const LatticeField two_steps = semigroup_apply(semigroup_apply(f, 0.02), 0.03);
    const LatticeField one_step = semigroup_apply(f, 0.05);
    double worst = 0.0;
    for (int m = 0; m <= lat.M; ++m) worst = std::max(worst, std::abs(two_steps[m] - one_step[m]));
    CHECK(worst < 1e-8);

    CHECK(integral(one_step) == doctest::Approx(integral(f)).epsilon(1e-9));

    LatticeField fat = LatticeField::from_function(lat, [](double) { return 1.0; });
    CHECK_THROWS_AS(semigroup_apply(fat, 0.01), TruncationError);
}

TEST_CASE("half-line semigroup keeps the wall at zero") {
    const Lattice lat(0.1, 140);
    const LatticeField f = oracles::random_field(lat, 9, 30, 70);
    const LatticeField w = half_line_semigroup_apply(f, 0.04);
    CHECK(w[0] == 0.0);
    // Against the dense oracle with an explicit odd reflection.
    const int M = lat.M;
    const Lattice wide(lat.h, 2 * M + 2);
    LatticeField odd = LatticeField::zeros(wide);
    for (int m = 1; m <= M; ++m) {
        odd[M + 1 + m] = f[m];
        odd[M + 1 - m] = -f[m];
    }
    const LatticeField spread = oracles::matrix_exp_apply(odd, 0.04);
    double worst = 0.0;
    for (int m = 0; m <= M; ++m) worst = std::max(worst, std::abs(w[m] - spread[M + 1 + m]));
    CHECK(worst < 1e-8);
}

namespace {

// Explicit stepping reference for the boundary-driven heat problem.
LatticeField ftcs_boundary_heat(const BoundaryPath& psi, const Lattice& lat, double t) {
    const double k = psi.dt();
    const int steps = static_cast<int>(std::llround(t / k));
    const double ratio = k / (lat.h * lat.h);
    LatticeField u = LatticeField::zeros(lat);
    u[0] = psi.values[0];
    for (int n = 0; n < steps; ++n) {
        LatticeField next = LatticeField::zeros(lat);
        for (int m = 1; m < lat.M; ++m) next[m] = u[m] + ratio * (u[m + 1] - 2.0 * u[m] + u[m - 1]);
        next[lat.M] = u[lat.M] + ratio * (0.0 - 2.0 * u[lat.M] + u[lat.M - 1]);
        next[0] = psi.values[n + 1];
        u = std::move(next);
    }
    return u;
}

}  // namespace

TEST_CASE("boundary-driven solution") {
    const Lattice lat(0.1, 100);
    const int N = 500;
    const double T = 0.5;

    const BoundaryPath zero = deterministic_path(DeterministicFamily::Zero, T, N);
    const LatticeField u0 = boundary_solution_u(zero, 0.25, lat);
    CHECK(u0.sup_abs() == 0.0);

    // Unit boundary data switched on at t=0+.
    const BoundaryPath one = deterministic_path(
        DeterministicFamily::Sampled, T, N, 0.0, 1.0, 1.0, [](double t) { return t > 0.0 ? 1.0 : 0.0; });
    KernelCache cache(lat.h, lat.M + 1);
    const LatticeField u = boundary_solution_u(one, T, lat, &cache);
    CHECK(u[0] == 1.0);  // u(t,0) = psi(t) by definition

    const LatticeField ref = ftcs_boundary_heat(one, lat, T);
    double worst = 0.0;
    for (int m = 0; m <= lat.M; ++m) worst = std::max(worst, std::abs(u[m] - ref[m]));
    CHECK(worst < 0.02);  // one time-order apart plus quadrature

    for (int m = 0; m <= lat.M; ++m) {
        CHECK(u[m] > -1e-6);
        CHECK(u[m] < 1.0 + 1e-6);
    }

    CHECK_THROWS_AS(boundary_solution_u(one, T + 0.5, lat), std::invalid_argument);
    CHECK_THROWS_AS(boundary_solution_u(one, 0.5 * (T / N), lat), std::invalid_argument);
}

TEST_CASE("boundary solution max principle against rough paths") {
    const Lattice lat(0.1, 80);
    const double T = 0.25;
    const int N = 250;
    PearsonParams params;
    params.nu1 = 2.0;
    params.nu2 = 0.5;
    params.gamma = 0.5;
    params.eta = 1.0;
    params.psi0 = 0.0;
    double worst_excess = 0.0;
    double worst_ratio = 0.0;
    double best_ratio = 1e300;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const BoundaryPath psi = simulate_pearson(params, T, N, seed);
        const LatticeField u = boundary_solution_u(psi, T, lat);
        worst_excess = std::max(worst_excess, u.sup_abs() - psi.sup_abs());

        // H^1-type size of u against the Holder size of psi stays in a band.
        const LatticeField du = d_plus(u);
        const double h1 = std::sqrt(std::pow(lp_norm(u, 2.0), 2) + std::pow(lp_norm(du, 2.0), 2));
        const double ratio = h1 / holder_seminorm(psi, 0.45);
        worst_ratio = std::max(worst_ratio, ratio);
        best_ratio = std::min(best_ratio, ratio);
    }
    CHECK(worst_excess < 1e-3);  // quadrature tolerance only
    CHECK(worst_ratio < 10.0);
    CHECK(best_ratio > 1e-4);
}
