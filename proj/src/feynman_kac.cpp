#include "rdlattice/feynman_kac.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "rdlattice/rng.hpp"

namespace rdlattice {

void GeneratorSpec::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("generator spec: h must be positive");
    if (!c_plus || !c_minus) throw std::invalid_argument("generator spec: jump coefficients required");
    if (!(rate_bound > 0.0) || !std::isfinite(rate_bound))
        throw std::invalid_argument("generator spec: finite positive rate bound required");
    if (!(horizon > 0.0)) throw std::invalid_argument("generator spec: horizon must be positive");
}

GeneratorSpec GeneratorSpec::heat(double h, double T) {
    GeneratorSpec spec;
    spec.h = h;
    spec.c_plus = [h](double, double) { return 1.0 / h; };
    spec.c_minus = [h](double, double) { return 1.0 / h; };
    spec.rate_bound = 2.0 / (h * h);
    spec.horizon = T;
    return spec;
}

double CtmcPath::position_at(double t) const {
    if (jump_times.empty() || t < jump_times.front()) return positions.empty() ? 0.0 : positions.front();
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - jump_times.begin()) - 1;
    return positions[idx];
}

namespace {

// One trajectory by thinning: candidate events arrive at the uniform
// rate bound and become +-h jumps with probability C+-/(h Lambda).
// segment(a, b, node) is invoked over the maximal intervals where the
// chain sits still, on_jump after each accepted jump.
template <typename SegmentCb, typename JumpCb>
void walk_chain(const GeneratorSpec& spec, double t0, long node0, NormalSampler& rng, double& tau,
                bool& hit, long& node_final, SegmentCb&& segment, JumpCb&& on_jump) {
    const double T = spec.horizon;
    double t = t0;
    long node = node0;
    hit = false;
    tau = std::numeric_limits<double>::infinity();
    node_final = node;
    if (node <= 0) {
        tau = t0;
        hit = true;
        return;
    }
    while (true) {
        const double t_next = t + rng.exponential(spec.rate_bound);
        if (t_next >= T) {
            segment(t, T, node);
            break;
        }
        const double x = node * spec.h;
        const double up = spec.c_plus(t_next, x) / (spec.h * spec.rate_bound);
        const double dn = spec.c_minus(t_next, x) / (spec.h * spec.rate_bound);
        if (up < -1e-12 || dn < -1e-12 || up + dn > 1.0 + 1e-9)
            throw std::domain_error("ctmc: jump rates leave [0, rate bound]");
        const double u = rng.uniform();
        segment(t, t_next, node);
        t = t_next;
        if (u < up) {
            ++node;
            on_jump(t, node);
        } else if (u < up + dn) {
            --node;
            on_jump(t, node);
        }
        if (node <= 0) {
            tau = t;
            hit = true;
            break;
        }
    }
    node_final = node;
}

long node_of(double x, double h, const char* who) {
    const double node_real = x / h;
    const long node = std::lround(node_real);
    if (std::abs(node_real - node) > 1e-9 || node < 0)
        throw std::invalid_argument(std::string(who) + ": position must be a nonnegative lattice point");
    return node;
}

}  // namespace

CtmcPath simulate_ctmc(const GeneratorSpec& spec, double t0, double x0, double T,
                       std::uint64_t seed) {
    GeneratorSpec local = spec;
    local.horizon = T;
    local.validate();
    const long node0 = node_of(x0, spec.h, "simulate_ctmc");

    CtmcPath path;
    path.jump_times.push_back(t0);
    path.positions.push_back(node0 * spec.h);

    NormalSampler rng(seed);
    double tau = 0.0;
    bool hit = false;
    long node_final = 0;
    walk_chain(
        local, t0, node0, rng, tau, hit, node_final, [](double, double, long) {},
        [&](double t, long node) {
            path.jump_times.push_back(t);
            path.positions.push_back(node * spec.h);
        });
    path.tau = tau;
    path.hit = hit;
    return path;
}

namespace {

double potential_integral(const GeneratorSpec& spec, double a, double b, long node) {
    if (!spec.potential || b <= a) return 0.0;
    const double x = node * spec.h;
    const double cap = spec.time_resolution;
    const int panels = cap > 0.0 ? std::max(1, static_cast<int>(std::ceil((b - a) / cap))) : 1;
    const double dt = (b - a) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * dt;
        acc += 0.5 * (spec.potential(lo, x) + spec.potential(lo + dt, x)) * dt;
    }
    return acc;
}

}  // namespace

namespace {

struct ChunkSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

ChunkSums sample_chunk(const GeneratorSpec& spec, double t, long node0, std::uint64_t seed,
                       long first, long last) {
    ChunkSums acc;
    for (long i = first; i < last; ++i) {
        NormalSampler rng(derive_seed(seed, "fk-sample", static_cast<std::uint64_t>(i)));
        double discount_exponent = 0.0;
        double tau = 0.0;
        bool hit = false;
        long node_final = 0;
        walk_chain(
            spec, t, node0, rng, tau, hit, node_final,
            [&](double a, double b, long node) {
                discount_exponent += potential_integral(spec, a, b, node);
            },
            [](double, long) {});
        double payoff;
        if (hit) {
            payoff = spec.boundary ? spec.boundary(std::min(tau, spec.horizon)) : 0.0;
        } else {
            payoff = spec.terminal ? spec.terminal(node_final * spec.h) : 0.0;
        }
        const double value = std::exp(-discount_exponent) * payoff;
        acc.sum += value;
        acc.sum_sq += value * value;
    }
    return acc;
}

}  // namespace

FkEstimate fk_estimate(const GeneratorSpec& spec, double t, double x, long n_samples,
                       std::uint64_t seed) {
    spec.validate();
    if (n_samples < 1) throw std::invalid_argument("fk_estimate: need at least one sample");
    const long node0 = node_of(x, spec.h, "fk_estimate");

    // Samples are independent streams; work is split into fixed-size
    // chunks whose partial sums are combined in index order, so the
    // result is bit-identical for any worker count.
    constexpr long kChunk = 4096;
    const long n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<ChunkSums> partials(static_cast<std::size_t>(n_chunks));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(
        std::min<long>(n_chunks, static_cast<long>(std::min(hw, 8u))));
    if (workers <= 1) {
        for (long c = 0; c < n_chunks; ++c)
            partials[static_cast<std::size_t>(c)] = sample_chunk(
                spec, t, node0, seed, c * kChunk, std::min(n_samples, (c + 1) * kChunk));
    } else {
        std::atomic<long> next_chunk{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (long c = next_chunk.fetch_add(1); c < n_chunks;
                         c = next_chunk.fetch_add(1))
                        partials[static_cast<std::size_t>(c)] = sample_chunk(
                            spec, t, node0, seed, c * kChunk, std::min(n_samples, (c + 1) * kChunk));
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& err : errors)
            if (err) std::rethrow_exception(err);
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const ChunkSums& part : partials) {
        sum += part.sum;
        sum_sq += part.sum_sq;
    }
    FkEstimate est;
    est.n = n_samples;
    est.mean = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - est.mean * est.mean);
    est.stddev = std::sqrt(var * static_cast<double>(n_samples) / std::max<long>(1, n_samples - 1));
    est.ci95 = 1.96 * est.stddev / std::sqrt(static_cast<double>(n_samples));
    return est;
}

FkEstimate fk_verify_s_tilde(const SchemeConfig& config, const std::vector<LatticeField>& g_history,
                             const std::vector<LatticeField>& f_history, double t, double x,
                             long n_samples, std::uint64_t seed) {
    const int N = config.steps();
    if (static_cast<int>(g_history.size()) != N + 1 || static_cast<int>(f_history.size()) != N + 1)
        throw std::invalid_argument("fk_verify_s_tilde: histories must hold every time step");
    if (t <= 0.0 || t > config.T + 1e-12)
        throw std::invalid_argument("fk_verify_s_tilde: probe time must lie in (0, T]");

    const double h = config.h;
    const double k = config.k;
    const double T = config.T;
    const int M = config.M;
    const double A = config.A;
    const double B = config.B;
    const double lambda = config.lambda;

    // Histories are piecewise constant in time (left value), matching
    // the explicit scheme; space is extended by the last value for g
    // and by the truncation policy for f and s0.
    auto step_of = [&](double forward_time) {
        const int n = static_cast<int>(std::floor(forward_time / k + 1e-12));
        return std::clamp(n, 0, N);
    };
    auto g_value = [&](int step, long node) {
        return g_history[step][static_cast<int>(std::min<long>(node, M))];
    };
    auto f_value = [&](int step, long node) -> double {
        if (node <= M) return f_history[step][static_cast<int>(node)];
        return f_history[step].right_ghost(config.truncation);
    };
    auto beta = [&](int step, long node, int direction) -> double {
        const LatticeField& g = g_history[step];
        double diff;
        if (direction > 0) {
            const double up = node < M ? g[static_cast<int>(node) + 1] : g[M];
            diff = (up - g_value(step, node)) / h;
        } else {
            if (node <= 0) return 0.0;
            const double dn = g[static_cast<int>(std::min<long>(node, M)) - 1];
            diff = (g_value(step, node) - dn) / h;
        }
        const double phi = A + B * g_value(step, node);
        return direction > 0 ? B * diff / (2.0 * phi) : -B * diff / (2.0 * phi);
    };

    // Reversed-time generator: the chain starts at sigma0 = T - t and
    // reads the histories at forward time T - sigma.
    GeneratorSpec spec;
    spec.h = h;
    spec.horizon = T;
    spec.time_resolution = k;
    spec.c_plus = [=](double sigma, double y) {
        const int step = step_of(T - sigma);
        return 1.0 / h + beta(step, node_of(y, h, "fk_verify_s_tilde"), +1);
    };
    spec.c_minus = [=](double sigma, double y) {
        const int step = step_of(T - sigma);
        return 1.0 / h + beta(step, node_of(y, h, "fk_verify_s_tilde"), -1);
    };
    spec.potential = [=](double sigma, double y) {
        const int step = step_of(T - sigma);
        const long node = node_of(y, h, "fk_verify_s_tilde");
        return lambda * g_value(step, node) * (1.0 - B * f_value(step, node));
    };
    spec.terminal = [=, &s0 = config.s0](double y) {
        const long node = node_of(y, h, "fk_verify_s_tilde");
        return node <= M ? s0[static_cast<int>(node)] : s0.right_ghost(config.truncation);
    };
    const BoundaryPath psi = config.psi;
    spec.boundary = [=](double sigma) {
        // psi(T - sigma), linearly interpolated on the path grid.
        const double forward = std::clamp(T - sigma, 0.0, psi.horizon());
        const double pos = forward / psi.dt();
        const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, psi.steps() - 1);
        const double frac = pos - lo;
        return (1.0 - frac) * psi.values[lo] + frac * psi.values[lo + 1];
    };

    // Tilted rates must stay nonnegative over the history grid; the
    // check doubles as the computation of the thinning bound.
    double worst_rate = 0.0;
    for (int n = 0; n <= N; ++n) {
        for (long node = 1; node <= M; ++node) {
            const double up = 1.0 / h + beta(n, node, +1);
            const double dn = 1.0 / h + beta(n, node, -1);
            if (up < 0.0 || dn < 0.0)
                throw std::domain_error(
                    "fk_verify_s_tilde: drift-tilted jump rate is negative for this data");
            if (lambda * g_value(n, node) * (1.0 - B * f_value(n, node)) < -1e-12)
                throw std::domain_error("fk_verify_s_tilde: discount potential is negative");
            worst_rate = std::max(worst_rate, (up + dn) / h);
        }
    }
    spec.rate_bound = std::max(worst_rate, 2.0 / (h * h)) * (1.0 + 1e-9);

    return fk_estimate(spec, T - t, x, n_samples, seed);
}

void write_estimate_json(const std::string& file, double t, double x, const FkEstimate& estimate) {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["x"] = x;
    j["mean"] = estimate.mean;
    j["ci95"] = estimate.ci95;
    j["n"] = estimate.n;
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_estimate_json: cannot open " + file);
    out << j.dump(2) << "\n";
}

}  // namespace rdlattice
