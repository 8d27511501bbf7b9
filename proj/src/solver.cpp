#include "rdlattice/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rdlattice {

int SchemeConfig::steps() const {
    const double ratio = T / k;
    const int n = static_cast<int>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("scheme config: T must be a positive integer multiple of k");
    return n;
}

std::vector<std::string> SchemeConfig::validate() const {
    std::vector<std::string> warnings;
    const Lattice lat = lattice();
    if (!(k > 0.0) || !(T > 0.0)) throw std::invalid_argument("scheme config: k and T must be positive");
    steps();
    if (!(lambda >= 0.0)) throw std::invalid_argument("scheme config: lambda must be nonnegative");
    if (!(eta > 0.0)) throw std::invalid_argument("scheme config: eta must be positive");
    if (!allow_general_B) {
        if (A != 1.0 || std::abs(B) != 1.0)
            throw std::invalid_argument(
                "scheme config: scaled regime requires A = 1 and B = +-1 (set allow_general_B to "
                "override)");
    }
    if (B > 0.0 && B >= 1.0 / eta)
        throw std::invalid_argument("scheme config: B > 0 requires B < 1/eta");
    if (s0.lattice != lat || c0.lattice != lat)
        throw std::invalid_argument("scheme config: initial fields must live on the configured lattice");
    if (!s0.finite() || !c0.finite())
        throw std::invalid_argument("scheme config: initial fields must be finite");
    if (s0[0] != 0.0) throw std::invalid_argument("scheme config: s0 must vanish at the boundary node");
    if (s0.min() < 0.0 || s0.max() > eta)
        throw std::invalid_argument("scheme config: s0 must take values in [0, eta]");
    if (!(c0_min() > 0.0)) throw std::invalid_argument("scheme config: c0 must be strictly positive");
    if (!(phi_min() > 0.0))
        throw std::invalid_argument("scheme config: porosity must stay strictly positive on c0");
    if (phi_max() >= 1.0)
        warnings.push_back("scaled porosity exceeds 1 on c0 (physical-range check applies before scaling)");

    const double path_dt = psi.dt();
    if (std::abs(path_dt - k) > 1e-12 * std::max(1.0, k))
        throw std::invalid_argument("scheme config: boundary path grid must match the time step k");
    if (psi.horizon() < T - 1e-12)
        throw std::invalid_argument("scheme config: boundary path does not cover the horizon");
    if (psi.values[0] != 0.0)
        warnings.push_back("psi(0) != 0: the splitting theory assumes zero initial boundary data");
    if (psi.min_value() < 0.0 || psi.max_value() > eta)
        warnings.push_back("boundary path leaves [0, eta]: positivity monitors may trip");
    if (snapshot_stride < 1) throw std::invalid_argument("scheme config: snapshot stride must be >= 1");
    return warnings;
}

StabilityReport check_stability(const SchemeConfig& config) {
    StabilityReport report;
    const double h2 = config.h * config.h;
    report.diffusion_bound = 0.5 * h2;
    if (config.B > 0.0) {
        report.reaction_bound =
            h2 / (2.0 + config.phi_max() / config.phi_min() + config.lambda * config.c0_max() * h2);
    } else {
        report.reaction_bound =
            h2 / (2.0 + config.lambda * config.c0_max() * h2 * (1.0 - config.B * config.eta));
    }
    report.k_max = std::min(report.diffusion_bound, report.reaction_bound);
    report.stable = config.k <= report.k_max * (1.0 + 1e-12);
    return report;
}

namespace {

struct MonitorScratch {
    double running_sup_s = 0.0;

    void observe(Monitors& mon, const LatticeField& s, const LatticeField& c, double eta,
                 double c0_max) {
        const int M = s.lattice.M;
        for (int m = 0; m <= M; ++m) {
            mon.s_min = std::min(mon.s_min, s[m]);
            mon.s_max = std::max(mon.s_max, s[m]);
            mon.c_min = std::min(mon.c_min, c[m]);
            mon.c_max = std::max(mon.c_max, c[m]);
            if (s[m] < 0.0 || s[m] >= eta) ++mon.range_violations;
            if (c[m] < 0.0 || c[m] > c0_max * (1.0 + 1e-14)) ++mon.range_violations;
        }
        double l2_sq = 0.0;
        for (int m = 0; m <= M; ++m) l2_sq += s[m] * s[m];
        l2_sq *= s.lattice.h;
        mon.sup_l2_sq_s = std::max(mon.sup_l2_sq_s, l2_sq);

        running_sup_s = std::max(running_sup_s, s.sup_abs());
        if (running_sup_s > 0.0) {
            const double edge =
                std::max({std::abs(s[M]), std::abs(s[M - 1]), std::abs(s[std::max(M - 2, 0)])});
            mon.tail_ratio = std::max(mon.tail_ratio, edge / running_sup_s);
        }
    }

    void accumulate_gradient(Monitors& mon, const LatticeField& s, double k,
                             TruncationPolicy policy) {
        const LatticeField grad = d_plus(s, policy);
        double l2_sq = 0.0;
        for (double v : grad.values) l2_sq += v * v;
        mon.grad_energy_acc += k * s.lattice.h * l2_sq;
    }
};

Monitors init_monitors(const LatticeField& s, const LatticeField& c) {
    Monitors mon;
    mon.s_min = s.min();
    mon.s_max = s.max();
    mon.c_min = c.min();
    mon.c_max = c.max();
    return mon;
}

std::optional<int> first_bad_node(const LatticeField& s, double eta) {
    for (int m = 0; m <= s.lattice.M; ++m)
        if (!std::isfinite(s[m]) || std::abs(s[m]) > 10.0 * eta) return m;
    return std::nullopt;
}

}  // namespace

std::optional<int> step_direct(SchemeState& state, const SchemeConfig& config) {
    const int M = config.M;
    const double h = config.h;
    const double k = config.k;
    const double ratio = k / (h * h);
    const double lam_k = config.lambda * k;

    const LatticeField& s = state.s;
    const LatticeField& c = state.c;
    LatticeField s_next = LatticeField::zeros(s.lattice);
    LatticeField c_next = LatticeField::zeros(s.lattice);

    // The calcite field is extended by its last value at the truncated
    // edge (a zero ghost would fabricate a porosity jump there); the
    // pollutant ghost follows the configured policy.
    auto phi_at = [&](int m) { return config.porosity(m <= M ? c[m] : c[M]); };
    auto s_at = [&](int m) { return m <= M ? s[m] : s.right_ghost(config.truncation); };

    for (int m = 1; m <= M; ++m) {
        const double phi_mid = phi_at(m);
        const double phi_up = phi_at(m + 1);
        const double phi_dn = phi_at(m - 1);
        const double a_up = ratio * (phi_up + phi_mid) / (2.0 * phi_mid);
        const double a_dn = ratio * (phi_mid + phi_dn) / (2.0 * phi_mid);
        const double a_mid = 1.0 - ratio * (phi_up + 2.0 * phi_mid + phi_dn) / (2.0 * phi_mid) -
                             lam_k * c[m] * (1.0 - config.B * s[m]);
        s_next[m] = a_up * s_at(m + 1) + a_dn * s[m - 1] + a_mid * s[m];
        c_next[m] = c[m] * std::exp(-lam_k * s[m] * phi_mid);
    }

    const double psi_now = config.psi.values[state.n];
    const double psi_next = config.psi.values[state.n + 1];
    s_next[0] = psi_next;
    c_next[0] = c[0] * std::exp(-lam_k * psi_now * config.porosity(c[0]));

    state.s = std::move(s_next);
    state.c = std::move(c_next);
    ++state.n;
    return first_bad_node(state.s, config.eta);
}

RunResult run_direct(const SchemeConfig& config) {
    config.validate();
    RunResult result;
    result.gate = check_stability(config);
    if (!result.gate.stable && !config.allow_unstable) {
        result.gate_refused = true;
        return result;
    }

    const int N = config.steps();
    SchemeState state{0, config.s0, config.c0};
    state.s[0] = config.psi.values[0];  // boundary node carries psi from the start
    const double c0_max = config.c0_max();

    result.monitors = init_monitors(state.s, state.c);
    MonitorScratch scratch;
    scratch.observe(result.monitors, state.s, state.c, config.eta, c0_max);
    result.snapshots.push_back({0, 0.0, state.s, state.c});

    for (int n = 0; n < N; ++n) {
        scratch.accumulate_gradient(result.monitors, state.s, config.k, config.truncation);
        const std::optional<int> bad = step_direct(state, config);
        if (bad) {
            result.diverged = true;
            result.diverged_step = state.n;
            result.diverged_node = *bad;
            result.snapshots.push_back({state.n, state.n * config.k, state.s, state.c});
            return result;
        }
        scratch.observe(result.monitors, state.s, state.c, config.eta, c0_max);
        if (state.n % config.snapshot_stride == 0 || state.n == N)
            result.snapshots.push_back({state.n, state.n * config.k, state.s, state.c});
    }
    return result;
}

namespace {

// Explicit heat step for the boundary-driven part u.
void ftcs_heat_step(LatticeField& u, double ratio, double psi_next, TruncationPolicy policy) {
    const int M = u.lattice.M;
    LatticeField next = LatticeField::zeros(u.lattice);
    for (int m = 1; m < M; ++m) next[m] = u[m] + ratio * (u[m + 1] - 2.0 * u[m] + u[m - 1]);
    next[M] = u[M] + ratio * (u.right_ghost(policy) - 2.0 * u[M] + u[M - 1]);
    next[0] = psi_next;
    u = std::move(next);
}

}  // namespace

std::optional<int> step_split(SplitState& state, const SchemeConfig& config,
                              const LatticeField& u_next) {
    const int M = config.M;
    const double h = config.h;
    const double k = config.k;
    const LatticeField& u = state.u;
    const LatticeField& v = state.v;
    const LatticeField& c = state.c;
    auto c_at = [&](int m) { return m <= M ? c[m] : c[M]; };
    auto v_at = [&](int m) { return m <= M ? v[m] : v.right_ghost(config.truncation); };
    auto u_at = [&](int m) { return m <= M ? u[m] : u.right_ghost(config.truncation); };

    LatticeField v_next = LatticeField::zeros(v.lattice);
    for (int m = 1; m <= M; ++m) {
        const double phi_mid = config.porosity(c[m]);
        const double b_c = 0.5 * config.B / phi_mid;
        const double gamma_c = config.lambda * c[m];
        const double dc_up = (c_at(m + 1) - c[m]) / h;
        const double dc_dn = (c[m] - c[m - 1]) / h;
        const double dv_up = (v_at(m + 1) - v[m]) / h;
        const double dv_dn = (v[m] - v[m - 1]) / h;
        const double du_up = (u_at(m + 1) - u[m]) / h;
        const double du_dn = (u[m] - u[m - 1]) / h;
        const double lap_v = (v_at(m + 1) - 2.0 * v[m] + v[m - 1]) / (h * h);
        const double total = u[m] + v[m];
        const double rhs = lap_v + b_c * (dc_up * dv_up + dc_dn * dv_dn) +
                           b_c * (dc_up * du_up + dc_dn * du_dn) - gamma_c * total +
                           gamma_c * config.B * total * total;
        v_next[m] = v[m] + k * rhs;
    }
    v_next[0] = 0.0;

    LatticeField c_next = LatticeField::zeros(c.lattice);
    for (int m = 1; m <= M; ++m)
        c_next[m] = c[m] * std::exp(-config.lambda * k * (u[m] + v[m]) * config.porosity(c[m]));
    c_next[0] =
        c[0] * std::exp(-config.lambda * k * config.psi.values[state.n] * config.porosity(c[0]));

    state.u = u_next;
    state.v = std::move(v_next);
    state.c = std::move(c_next);
    ++state.n;

    LatticeField s = state.u;
    for (int m = 0; m <= M; ++m) s[m] += state.v[m];
    return first_bad_node(s, config.eta);
}

SplitRunResult run_split(const SchemeConfig& config, UProviderKind provider) {
    config.validate();
    SplitRunResult result;
    result.combined.gate = check_stability(config);
    if (!result.combined.gate.stable && !config.allow_unstable) {
        result.combined.gate_refused = true;
        return result;
    }

    const int N = config.steps();
    const int M = config.M;
    const double h = config.h;
    const double k = config.k;
    const double ratio = k / (h * h);
    const double c0_max = config.c0_max();
    const Lattice lat = config.lattice();

    SplitState state;
    state.u = LatticeField::zeros(lat);
    state.u[0] = config.psi.values[0];
    state.v = config.s0;
    state.c = config.c0;

    KernelCache cache(h, M + 1);

    auto combined_s = [&]() {
        LatticeField s = state.u;
        for (int m = 0; m <= M; ++m) s[m] += state.v[m];
        return s;
    };

    LatticeField s_now = combined_s();
    result.combined.monitors = init_monitors(s_now, state.c);
    MonitorScratch scratch;
    scratch.observe(result.combined.monitors, s_now, state.c, config.eta, c0_max);
    result.combined.snapshots.push_back({0, 0.0, s_now, state.c});
    result.u_parts.push_back({0, 0.0, state.u, state.v});

    for (int n = 0; n < N; ++n) {
        scratch.accumulate_gradient(result.combined.monitors, s_now, k, config.truncation);

        LatticeField u_next;
        if (provider == UProviderKind::Ftcs) {
            u_next = state.u;
            ftcs_heat_step(u_next, ratio, config.psi.values[n + 1], config.truncation);
        } else {
            u_next = boundary_solution_u(config.psi, (n + 1) * k, lat, &cache);
        }
        const std::optional<int> bad = step_split(state, config, u_next);

        s_now = combined_s();
        if (bad) {
            result.combined.diverged = true;
            result.combined.diverged_step = state.n;
            result.combined.diverged_node = *bad;
            result.combined.snapshots.push_back({state.n, state.n * k, s_now, state.c});
            return result;
        }
        scratch.observe(result.combined.monitors, s_now, state.c, config.eta, c0_max);
        if (state.n % config.snapshot_stride == 0 || state.n == N) {
            result.combined.snapshots.push_back({state.n, state.n * k, s_now, state.c});
            result.u_parts.push_back({state.n, state.n * k, state.u, state.v});
        }
    }
    return result;
}

LatticeField c_explicit(const LatticeField& c0, const LatticeField& s_time_integral, double A,
                        double B, double lambda) {
    require_same_lattice(c0, s_time_integral);
    LatticeField out = LatticeField::zeros(c0.lattice);
    for (int m = 0; m <= c0.lattice.M; ++m) {
        const double denom = (A + B * c0[m]) * std::exp(lambda * A * s_time_integral[m]) - B * c0[m];
        if (!(denom > 0.0))
            throw std::domain_error("c_explicit: nonpositive denominator (invalid data)");
        out[m] = A * c0[m] / denom;
    }
    return out;
}

LteResult local_truncation_error(const SchemeConfig& coarse, int refine_factor) {
    if (refine_factor < 2)
        throw std::invalid_argument("local_truncation_error: refine factor must be >= 2");
    const double fine_dt = coarse.k / refine_factor;
    if (std::abs(coarse.psi.dt() - fine_dt) > 1e-12 * std::max(1.0, fine_dt))
        throw std::invalid_argument(
            "local_truncation_error: boundary path must be sampled at the fine step k/refine");

    SchemeConfig fine = coarse;
    fine.k = fine_dt;
    fine.snapshot_stride = refine_factor;
    const RunResult fine_run = run_direct(fine);
    if (fine_run.gate_refused || fine_run.diverged)
        throw std::runtime_error("local_truncation_error: reference run failed");

    SchemeConfig one_step = coarse;
    one_step.psi = downsample(coarse.psi, refine_factor);

    LteResult result;
    const int M = coarse.M;
    for (std::size_t i = 0; i + 1 < fine_run.snapshots.size(); ++i) {
        const TrajectorySnapshot& now = fine_run.snapshots[i];
        const TrajectorySnapshot& next = fine_run.snapshots[i + 1];
        SchemeState probe{now.step / refine_factor, now.s, now.c};
        step_direct(probe, one_step);
        double worst = 0.0;
        for (int m = 1; m < M; ++m)
            worst = std::max(worst, std::abs(next.s[m] - probe.s[m]) / coarse.k);
        result.per_step_max.push_back(worst);
        result.overall_max = std::max(result.overall_max, worst);
    }
    return result;
}

}  // namespace rdlattice
