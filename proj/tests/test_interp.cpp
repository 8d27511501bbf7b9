#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdlattice/interp.hpp"
#include "support/oracles.hpp"

using namespace rdlattice;

TEST_CASE("piecewise-constant extension") {
    const Lattice lat(0.5, 6);
    LatticeField f = LatticeField::zeros(lat);
    f[0] = 1.0;
    const PiecewiseConstant ext = extend(f);
    CHECK(ext.eval(0.0) == 1.0);
    CHECK(ext.eval(0.49) == 1.0);
    CHECK(ext.eval(0.51) == 0.0);

    const LatticeField g = oracles::random_field(lat, 1);
    const PiecewiseConstant extg = extend(g);
    CHECK(extg.integral() == doctest::Approx(integral(g)).epsilon(1e-14));
    for (int m = 0; m <= lat.M; ++m) CHECK(extg.eval(lat.x(m)) == g[m]);
}

TEST_CASE("cell-average discretization") {
    const Lattice lat(0.4, 10);
    const LatticeField linear = discretize([](double x) { return x; }, lat);
    for (int m = 0; m <= lat.M; ++m)
        CHECK(linear[m] == doctest::Approx(lat.x(m) + 0.5 * lat.h).epsilon(1e-14));
    CHECK(linear[0] == doctest::Approx(lat.h / 2.0).epsilon(1e-14));

    const LatticeField constant = discretize([](double) { return 2.5; }, lat);
    for (int m = 0; m <= lat.M; ++m) CHECK(constant[m] == doctest::Approx(2.5).epsilon(1e-15));

    // Round trip through the extension is the identity on lattice fields
    // (breakpoint-aware averaging, no endpoint sampling).
    const LatticeField f = oracles::random_field(lat, 7);
    const LatticeField back = discretize(extend(f), lat);
    for (int m = 0; m <= lat.M; ++m) CHECK(back[m] == doctest::Approx(f[m]).epsilon(1e-14));

    CHECK_THROWS_AS(discretize([](double) { return 0.0; }, lat, 8), std::invalid_argument);

    // Sample-based variant against the callable one.
    const Lattice fine(lat.h / 16.0, 16 * (lat.M + 1) - 1);
    const LatticeField samples =
        LatticeField::from_function(fine, [](double x) { return std::sin(1.7 * x); });
    const LatticeField via_samples = discretize_samples(samples, lat);
    for (int m = 0; m <= lat.M; ++m) {
        // Left-rule average of 16 samples per cell: first-order agreement.
        const double reference =
            discretize([](double x) { return std::sin(1.7 * x); }, lat)[m];
        CHECK(via_samples[m] == doctest::Approx(reference).epsilon(0.03));
    }
}

TEST_CASE("extension-discretization duality") {
    const Lattice lat(0.25, 24);

    SUBCASE("constant weight: both sides equal the lattice integral") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const LatticeField f = oracles::random_field(lat, seed);
            CHECK(duality_residual(f, [](double) { return 1.0; }) < 1e-12);
        }
    }

    SUBCASE("cubic weights are integrated exactly by both quadratures") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const LatticeField f = oracles::random_field(lat, seed + 50);
            const double residual = duality_residual(
                f, [](double x) { return 0.3 * x * x * x - 1.2 * x * x + 0.5 * x - 2.0; });
            CHECK(residual < 1e-10);
        }
    }

    SUBCASE("delta weight picks out the first cell average") {
        LatticeField delta = LatticeField::zeros(lat);
        delta[0] = 1.0 / lat.h;
        CHECK(duality_residual(delta, [](double x) { return std::cos(x); }) < 1e-9);
    }
}

TEST_CASE("extension preserves lattice norms exactly") {
    // || E_h f ||_{L^p}, evaluated on a 16x finer sampling, equals the
    // lattice norm: piecewise-constant integration is exact.
    const Lattice lat(0.2, 30);
    const LatticeField f = oracles::random_field(lat, 31);
    const Lattice fine(lat.h / 16.0, 16 * (lat.M + 1) - 1);
    const LatticeField resampled = resample_to_fine(f, fine);
    for (double p : {1.0, 2.0, 4.0}) {
        CHECK(lp_norm(resampled, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-12));
    }
}

TEST_CASE("intergrid distances") {
    const Lattice coarse(0.2, 40);
    const Lattice fine(0.1, 81);

    SUBCASE("piecewise-constant refinement of a field is at distance zero") {
        const LatticeField f = oracles::random_field(coarse, 3);
        const LatticeField refined = resample_to_fine(f, fine);
        CHECK(intergrid_distance(f, refined, 2.0) == 0.0);
    }

    SUBCASE("zero coarse field gives the fine norm") {
        const LatticeField zero = LatticeField::zeros(coarse);
        const LatticeField g = oracles::random_field(fine, 4);
        CHECK(intergrid_distance(zero, g, 2.0) == doctest::Approx(lp_norm(g, 2.0)).epsilon(1e-14));
    }

    SUBCASE("smooth profiles at successive meshes are first-order apart") {
        auto profile = [](double x) { return std::exp(-x); };
        std::vector<double> gaps;
        for (double h : {0.2, 0.1, 0.05}) {
            const Lattice lo(h, static_cast<int>(std::lround(8.0 / h)));
            const Lattice hi(h / 2.0, 2 * static_cast<int>(std::lround(8.0 / h)));
            const LatticeField f_lo = LatticeField::from_function(lo, profile);
            const LatticeField f_hi = LatticeField::from_function(hi, profile);
            gaps.push_back(intergrid_distance(f_lo, f_hi, 2.0));
        }
        CHECK(gaps[0] / gaps[1] == doctest::Approx(2.0).epsilon(0.15));
        CHECK(gaps[1] / gaps[2] == doctest::Approx(2.0).epsilon(0.15));
    }

    SUBCASE("Besov variant agrees with the analyzer on the fine lattice") {
        const BesovAnalyzer analyzer(fine.h);
        const LatticeField f = oracles::random_field(coarse, 5, 4, 30);
        const LatticeField g = oracles::random_field(fine, 6, 8, 60);
        const double direct = intergrid_distance_besov(f, g, BesovSpec{0.45, 2.0, 2.0}, analyzer);
        LatticeField diff = resample_to_fine(f, fine);
        for (int m = 0; m <= fine.M; ++m) diff[m] -= g[m];
        CHECK(direct == doctest::Approx(analyzer.besov_norm(diff, BesovSpec{0.45, 2.0, 2.0}))
                            .epsilon(1e-13));
    }

    SUBCASE("non-nested meshes are rejected") {
        const Lattice odd(0.13, 40);
        const LatticeField f = oracles::random_field(coarse, 7);
        const LatticeField g = oracles::random_field(odd, 8);
        CHECK_THROWS_AS(intergrid_distance(f, g, 2.0), std::invalid_argument);
    }
}
