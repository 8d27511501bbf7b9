#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rdlattice/boundary.hpp"

using namespace rdlattice;

namespace {

PearsonParams bounded_params() {
    PearsonParams p;
    p.nu1 = 2.0;
    p.nu2 = 0.5;
    p.gamma = 0.5;
    p.eta = 1.0;
    p.psi0 = 0.5;
    return p;
}

}  // namespace

TEST_CASE("noise-free dynamics") {
    PearsonParams p = bounded_params();
    p.nu2 = 0.0;

    SUBCASE("starting at the reversion level is a fixed point") {
        const BoundaryPath path = simulate_pearson(p, 1.0, 200, 1);
        for (double v : path.values) CHECK(v == doctest::Approx(p.gamma).epsilon(1e-12));
    }

    SUBCASE("relaxation towards the reversion level") {
        p.psi0 = 0.9;
        const int N = 400;
        const BoundaryPath path = simulate_pearson(p, 1.0, N, 1);
        double worst = 0.0;
        for (int n = 0; n <= N; ++n) {
            const double exact = p.gamma + (p.psi0 - p.gamma) * std::exp(-p.nu1 * path.times[n]);
            worst = std::max(worst, std::abs(path.values[n] - exact));
        }
        CHECK(worst < 5.0 / N);
        // And halving the step roughly halves the gap.
        const BoundaryPath fine = simulate_pearson(p, 1.0, 2 * N, 1);
        double worst_fine = 0.0;
        for (int n = 0; n <= 2 * N; ++n) {
            const double exact = p.gamma + (p.psi0 - p.gamma) * std::exp(-p.nu1 * fine.times[n]);
            worst_fine = std::max(worst_fine, std::abs(fine.values[n] - exact));
        }
        CHECK(worst_fine < 0.75 * worst);
    }
}

TEST_CASE("bounded regime flag") {
    CHECK(bounded_params().bounded_regime());
    PearsonParams q = bounded_params();
    q.nu2 = 3.0;  // violates the barrier condition
    CHECK(!q.bounded_regime());
    CHECK(!simulate_pearson(q, 0.5, 100, 3).certified_bounded);
}

TEST_CASE("bounded-regime sweep stays inside the barriers") {
    const PearsonParams p = bounded_params();
    long clamps = 0;
    bool all_inside = true;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const BoundaryPath path = simulate_pearson(p, 0.5, 64, seed);
        all_inside = all_inside && path.min_value() >= 0.0 && path.max_value() <= p.eta;
        clamps += path.clamp_count;
    }
    CHECK(all_inside);
    CHECK(clamps == 0);
}

TEST_CASE("projected Euler fallback stays inside by clamping") {
    PearsonParams p = bounded_params();
    p.nu2 = 1.5;  // uncertified regime
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const BoundaryPath path =
            simulate_pearson(p, 0.5, 128, seed, PearsonScheme::ProjectedEuler);
        CHECK(path.min_value() >= 0.0);
        CHECK(path.max_value() <= p.eta);
    }
}

TEST_CASE("seed determinism") {
    const PearsonParams p = bounded_params();
    const BoundaryPath a = simulate_pearson(p, 1.0, 512, 777);
    const BoundaryPath b = simulate_pearson(p, 1.0, 512, 777);
    for (int n = 0; n <= 512; ++n) CHECK(a.values[n] == b.values[n]);
    const BoundaryPath c = simulate_pearson(p, 1.0, 512, 778);
    double diff = 0.0;
    for (int n = 0; n <= 512; ++n) diff = std::max(diff, std::abs(a.values[n] - c.values[n]));
    CHECK(diff > 1e-6);
}

TEST_CASE("deterministic families") {
    const BoundaryPath zero = deterministic_path(DeterministicFamily::Zero, 1.0, 8);
    for (double v : zero.values) CHECK(v == 0.0);

    const BoundaryPath constant = deterministic_path(DeterministicFamily::Constant, 1.0, 8, 0.3);
    for (double v : constant.values) CHECK(v == 0.3);

    const BoundaryPath power = deterministic_path(DeterministicFamily::Power, 1.0, 4, 0.0, 0.5);
    CHECK(power.values[0] == 0.0);
    CHECK(power.values[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(power.values[2] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(power.values[3] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(power.values[4] == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(deterministic_path(DeterministicFamily::Power, 1.0, 4, 0.0, 1.5),
                    std::invalid_argument);
}

TEST_CASE("holder seminorm") {
    const BoundaryPath linear = deterministic_path(DeterministicFamily::Power, 1.0, 16, 0.0, 1.0);
    CHECK(holder_seminorm(linear, 0.5) == doctest::Approx(1.0).epsilon(1e-13));

    const BoundaryPath constant = deterministic_path(DeterministicFamily::Constant, 1.0, 16, 0.4);
    CHECK(holder_seminorm(constant, 0.3) == 0.0);

    const BoundaryPath root = deterministic_path(DeterministicFamily::Power, 1.0, 64, 0.0, 0.5);
    CHECK(holder_seminorm(root, 0.5) == doctest::Approx(1.0).epsilon(1e-13));

    BoundaryPath tiny;
    tiny.times = {0.0};
    tiny.values = {0.0};
    CHECK_THROWS_AS(holder_seminorm(tiny, 0.5), std::invalid_argument);

    // On [0,1] every grid gap is <= 1, so the seminorm is monotone
    // nondecreasing in beta (the embedding direction between Holder classes).
    const PearsonParams p = bounded_params();
    const BoundaryPath path = simulate_pearson(p, 1.0, 256, 5);
    double previous = holder_seminorm(path, 0.1);
    for (double beta : {0.2, 0.3, 0.4, 0.5}) {
        const double current = holder_seminorm(path, beta);
        CHECK(current >= previous - 1e-12);
        previous = current;
    }
}

TEST_CASE("holder growth separates below- and above-threshold exponents") {
    // Common randomness across refinements: generate fine, downsample coarse.
    const PearsonParams p = bounded_params();
    const int fine_steps = 8192;
    const BoundaryPath fine = simulate_pearson(p, 1.0, fine_steps, 99);
    const BoundaryPath coarse = downsample(fine, 16);

    const double low_coarse = holder_seminorm(coarse, 0.45);
    const double low_fine = holder_seminorm(fine, 0.45);
    CHECK(low_fine < 1.6 * low_coarse);  // stable under refinement

    const double high_coarse = holder_seminorm(coarse, 0.75);
    const double high_fine = holder_seminorm(fine, 0.75);
    CHECK(high_fine > 1.5 * high_coarse);  // blows up past the true regularity
}

TEST_CASE("downsample") {
    const PearsonParams p = bounded_params();
    const BoundaryPath path = simulate_pearson(p, 1.0, 8, 21);

    const BoundaryPath same = downsample(path, 1);
    CHECK(same.values == path.values);

    const BoundaryPath half = downsample(path, 2);
    CHECK(half.steps() == 4);
    for (int n = 0; n <= 4; ++n) {
        CHECK(half.values[n] == path.values[2 * n]);
        CHECK(half.times[n] == path.times[2 * n]);
    }

    const BoundaryPath quarter_direct = downsample(path, 4);
    const BoundaryPath quarter_composed = downsample(downsample(path, 2), 2);
    CHECK(quarter_direct.values == quarter_composed.values);

    CHECK_THROWS_AS(downsample(path, 3), std::invalid_argument);
}

TEST_CASE("csv round trip") {
    const PearsonParams p = bounded_params();
    const BoundaryPath path = simulate_pearson(p, 0.7, 97, 2024);
    const std::string file = (std::filesystem::temp_directory_path() / "rdlat_path.csv").string();
    write_path_csv(path, file);
    const BoundaryPath back = read_path_csv(file);
    REQUIRE(back.steps() == path.steps());
    for (int n = 0; n <= path.steps(); ++n) {
        CHECK(back.times[n] == path.times[n]);
        CHECK(back.values[n] == path.values[n]);
    }
    std::filesystem::remove(file);
}

TEST_CASE("parameter validation") {
    PearsonParams p = bounded_params();
    p.gamma = 2.0;  // above the barrier
    CHECK_THROWS_AS(simulate_pearson(p, 1.0, 10, 0), std::invalid_argument);
    p = bounded_params();
    p.psi0 = -0.1;
    CHECK_THROWS_AS(simulate_pearson(p, 1.0, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_pearson(bounded_params(), 1.0, 0, 0), std::invalid_argument);
}
