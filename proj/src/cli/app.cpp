#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rdlattice/besov.hpp"
#include "rdlattice/feynman_kac.hpp"
#include "rdlattice/heat_kernel.hpp"
#include "rdlattice/interp.hpp"
#include "rdlattice/rng.hpp"

namespace rdlattice::cli {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json load_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file: " + file);
    json j;
    in >> j;
    return j;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(std::stod(token));
    }
    if (out.empty()) throw std::runtime_error("empty list argument");
    return out;
}

int fail_schema(const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return kIoOrSchemaError;
}

double smooth_bump(double x, double center, double width) {
    const double r = (x - center) / width;
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

LatticeField build_field(const json& spec, const Lattice& lat, const char* kind) {
    const std::string family = spec.value("family", "zero");
    if (family == "zero") return LatticeField::zeros(lat);
    if (family == "constant") {
        const double value = spec.at("value").get<double>();
        return LatticeField::from_function(lat, [value](double) { return value; });
    }
    if (family == "bump") {
        const double amplitude = spec.at("amplitude").get<double>();
        const double center = spec.at("center").get<double>();
        const double width = spec.at("width").get<double>();
        const double base = spec.value("base", 0.0);
        return LatticeField::from_function(
            lat, [=](double x) { return base + amplitude * smooth_bump(x, center, width); });
    }
    throw std::runtime_error(std::string(kind) + ": unknown field family '" + family + "'");
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
}

json gate_to_json(const StabilityReport& gate) {
    json j;
    j["stable"] = gate.stable;
    j["k_max"] = gate.k_max;
    j["diffusion_bound"] = gate.diffusion_bound;
    j["reaction_bound"] = gate.reaction_bound;
    return j;
}

json monitors_to_json(const Monitors& mon) {
    json j;
    j["s_min"] = mon.s_min;
    j["s_max"] = mon.s_max;
    j["c_min"] = mon.c_min;
    j["c_max"] = mon.c_max;
    j["sup_l2_sq_s"] = mon.sup_l2_sq_s;
    j["grad_energy_acc"] = mon.grad_energy_acc;
    j["energy_functional"] = mon.energy_functional();
    j["range_violations"] = mon.range_violations;
    j["tail_ratio"] = mon.tail_ratio;
    j["tail_ok"] = mon.tail_ratio <= 1e-8;
    return j;
}

}  // namespace

std::string resolve_out_dir(const std::string& flag_value) {
    std::string dir = flag_value;
    if (dir.empty()) {
        const char* env = std::getenv("RDLAT_OUT");
        dir = env ? env : "rdlat_out";
    }
    std::filesystem::create_directories(dir);
    return dir;
}

BoundaryPath build_boundary_path(const json& psi_spec, double T, int steps, double eta,
                                 std::uint64_t root_seed, json* resolved) {
    const std::string source = psi_spec.value("source", "zero");
    json params = psi_spec.value("params", json::object());
    json out_spec;
    out_spec["source"] = source;

    BoundaryPath path;
    if (source == "pearson") {
        PearsonParams pearson;
        pearson.nu1 = params.value("nu1", 2.0);
        pearson.nu2 = params.value("nu2", 0.5);
        pearson.eta = params.value("eta", eta);
        pearson.gamma = params.value("gamma", 0.5 * pearson.eta);
        pearson.psi0 = params.value("psi0", 0.0);
        const double eps = params.value("eps", 1e-3);
        const std::string scheme_name = params.value("scheme", "lamperti");
        const PearsonScheme scheme = scheme_name == "projected_euler"
                                         ? PearsonScheme::ProjectedEuler
                                         : PearsonScheme::LampertiTruncated;
        const std::uint64_t seed =
            psi_spec.contains("seed") ? psi_spec.at("seed").get<std::uint64_t>()
                                      : derive_seed(root_seed, "psi");
        path = simulate_pearson(pearson, T, steps, seed, scheme, eps);
        out_spec["seed"] = seed;
        out_spec["params"] = {{"nu1", pearson.nu1},   {"nu2", pearson.nu2},
                              {"gamma", pearson.gamma}, {"eta", pearson.eta},
                              {"psi0", pearson.psi0},   {"scheme", scheme_name},
                              {"eps", eps}};
        out_spec["bounded_regime"] = pearson.bounded_regime();
    } else if (source == "zero") {
        path = deterministic_path(DeterministicFamily::Zero, T, steps);
    } else if (source == "constant") {
        const double value = params.value("value", 0.0);
        path = deterministic_path(DeterministicFamily::Constant, T, steps, value);
        out_spec["params"] = {{"value", value}};
    } else if (source == "power") {
        const double beta = params.value("beta", 0.5);
        const double scale = params.value("scale", 1.0);
        path = deterministic_path(DeterministicFamily::Power, T, steps, 0.0, beta, scale);
        out_spec["params"] = {{"beta", beta}, {"scale", scale}};
    } else if (source == "csv") {
        const std::string file = params.at("path").get<std::string>();
        path = read_path_csv(file);
        out_spec["params"] = {{"path", file}};
        const double want_dt = T / steps;
        if (path.steps() != steps || std::abs(path.dt() - want_dt) > 1e-12)
            throw std::runtime_error("psi csv: grid does not match T and the step count");
    } else {
        throw std::runtime_error("unknown psi source '" + source + "'");
    }
    if (resolved) *resolved = out_spec;
    return path;
}

ResolvedSimulation resolve_simulation(const json& input, const Overrides& overrides) {
    ResolvedSimulation sim;
    sim.root_seed = overrides.seed ? *overrides.seed : input.value("seed", std::uint64_t{0});

    SchemeConfig& cfg = sim.config;
    cfg.A = input.value("A", 1.0);
    cfg.B = input.value("B", -1.0);
    cfg.lambda = input.value("lambda", 1.0);
    cfg.eta = input.value("eta", 1.0);
    cfg.h = input.value("h", 0.1);
    cfg.T = input.value("T", 0.5);
    cfg.M = input.value("M", 100);
    cfg.snapshot_stride = input.value("snapshots", 10);
    cfg.allow_unstable = input.value("allow_unstable", false) || overrides.allow_unstable;
    cfg.allow_general_B = input.value("allow_general_B", false);
    const std::string trunc = input.value("truncation", "zero");
    if (trunc != "zero" && trunc != "last") throw std::runtime_error("truncation must be 'zero' or 'last'");
    cfg.truncation = trunc == "zero" ? TruncationPolicy::ZeroExtension : TruncationPolicy::LastValueExtension;

    const Lattice lat = cfg.lattice();
    cfg.s0 = build_field(input.value("s0", json{{"family", "zero"}}), lat, "s0");
    cfg.c0 = build_field(input.value("c0", json{{"family", "constant"}, {"value", 0.5}}), lat, "c0");

    // Time step: explicit value, or "auto" = largest uniform step at or
    // below 0.9 k_max that divides T.
    double k_value;
    if (!input.contains("k") || (input.at("k").is_string() && input.at("k") == "auto")) {
        SchemeConfig probe = cfg;
        probe.k = 1e-9;  // placeholder below the gate for validation-free stability query
        const StabilityReport gate = check_stability(probe);
        const int n_steps = static_cast<int>(std::ceil(cfg.T / (0.9 * gate.k_max)));
        k_value = cfg.T / n_steps;
    } else {
        k_value = input.at("k").get<double>();
    }
    cfg.k = k_value;

    json psi_resolved;
    cfg.psi = build_boundary_path(input.value("psi", json{{"source", "zero"}}), cfg.T, cfg.steps(),
                                  cfg.eta, sim.root_seed, &psi_resolved);

    json& r = sim.resolved;
    r["A"] = cfg.A;
    r["B"] = cfg.B;
    r["lambda"] = cfg.lambda;
    r["eta"] = cfg.eta;
    r["h"] = cfg.h;
    r["k"] = cfg.k;
    r["T"] = cfg.T;
    r["M"] = cfg.M;
    r["truncation"] = trunc;
    r["s0"] = input.value("s0", json{{"family", "zero"}});
    r["c0"] = input.value("c0", json{{"family", "constant"}, {"value", 0.5}});
    r["psi"] = psi_resolved;
    r["snapshots"] = cfg.snapshot_stride;
    r["allow_unstable"] = cfg.allow_unstable;
    r["allow_general_B"] = cfg.allow_general_B;
    r["seed"] = sim.root_seed;
    return sim;
}

namespace {

std::string trajectory_csv(const RunResult& result, const ResolvedSimulation& sim) {
    std::string text = "# config " + sim.resolved.dump() + "\n";
    text += "n,t,m,x,s,c\n";
    char line[160];
    for (const TrajectorySnapshot& snap : result.snapshots) {
        for (int m = 0; m <= sim.config.M; ++m) {
            std::snprintf(line, sizeof line, "%d,%.17g,%d,%.17g,%.17g,%.17g\n", snap.step, snap.t, m,
                          sim.config.lattice().x(m), snap.s[m], snap.c[m]);
            text += line;
        }
    }
    return text;
}

json summary_json(const RunResult& result, const ResolvedSimulation& sim,
                  const std::vector<std::string>& warnings) {
    json j;
    j["gate"] = gate_to_json(result.gate);
    j["gate_refused"] = result.gate_refused;
    j["diverged"] = result.diverged;
    if (result.diverged) {
        j["diverged_step"] = result.diverged_step;
        j["diverged_node"] = result.diverged_node;
    }
    if (!result.gate_refused) j["monitors"] = monitors_to_json(result.monitors);
    j["warnings"] = warnings;
    j["psi"] = {{"min", sim.config.psi.min_value()},
                {"max", sim.config.psi.max_value()},
                {"clamp_count", sim.config.psi.clamp_count},
                {"certified_bounded", sim.config.psi.certified_bounded}};
    j["config"] = sim.resolved;
    return j;
}

}  // namespace

int cmd_simulate_json(const json& input, const std::string& out_dir, const Overrides& overrides) {
    ResolvedSimulation sim;
    std::vector<std::string> warnings;
    try {
        sim = resolve_simulation(input, overrides);
        warnings = sim.config.validate();
    } catch (const std::exception& e) {
        return fail_schema(e);
    }

    const RunResult result = run_direct(sim.config);
    const std::string dir = resolve_out_dir(out_dir);
    write_text_file(dir + "/summary.json", summary_json(result, sim, warnings).dump(2) + "\n");
    if (result.gate_refused) return kGateRefused;
    write_text_file(dir + "/trajectory.csv", trajectory_csv(result, sim));
    return result.diverged ? kDiverged : kOk;
}

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 const Overrides& overrides) {
    json input;
    try {
        input = load_json_file(config_file);
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
    return cmd_simulate_json(input, out_dir, overrides);
}

namespace {

// Step counts per refinement level: each level needs S | N_l and
// N_l | N_fine so one fine boundary path downsampled by N_fine/N_l
// serves every level (common random numbers), with k_l under the gate.
std::vector<int> level_step_counts(const std::vector<SchemeConfig>& levels, int time_samples,
                                   double safety) {
    const int L = static_cast<int>(levels.size());
    std::vector<int> n_min(L);
    for (int l = 0; l < L; ++l) {
        const StabilityReport gate = check_stability(levels[l]);
        n_min[l] = static_cast<int>(std::ceil(levels[l].T / (safety * gate.k_max)));
    }
    std::vector<int> counts(L);
    int fine = time_samples * ((n_min[L - 1] + time_samples - 1) / time_samples);
    counts[L - 1] = fine;
    const int fine_over_s = fine / time_samples;
    for (int l = 0; l < L - 1; ++l) {
        int best = fine;
        for (int d = 1; d <= fine_over_s; ++d) {
            if (fine_over_s % d != 0) continue;
            const int candidate = time_samples * d;
            if (candidate >= n_min[l]) best = std::min(best, candidate);
        }
        counts[l] = best;
    }
    return counts;
}

}  // namespace

int cmd_converge_json(const json& input, const std::string& out_dir, const Overrides& overrides) {
    try {
        const json study = input.value("study", json::object());
        const int levels = study.value("levels", 3);
        const int time_samples = study.value("time_samples", 10);
        const double safety = study.value("safety", 0.9);
        const double alpha = study.value("alpha", 0.45);
        const double p = study.value("p", 2.0);
        if (levels < 2) throw std::runtime_error("study needs at least two levels");

        ResolvedSimulation base = resolve_simulation(input, overrides);

        // Build per-level configs on halved meshes over a fixed extent.
        // The time step and boundary path are placeholders here; both are
        // rebuilt below once the nested step counts are known.
        std::vector<ResolvedSimulation> sims(levels);
        for (int l = 0; l < levels; ++l) {
            json level_input = input;
            level_input["h"] = base.config.h / std::ldexp(1.0, l);
            level_input["M"] = base.config.M * (1 << l);
            level_input["k"] = base.config.T;
            level_input["psi"] = json{{"source", "zero"}};
            sims[l] = resolve_simulation(level_input, overrides);
        }
        std::vector<SchemeConfig> cfgs(levels);
        for (int l = 0; l < levels; ++l) cfgs[l] = sims[l].config;
        const std::vector<int> counts = level_step_counts(cfgs, time_samples, safety);

        // One boundary path at the finest grid, downsampled per level.
        json psi_resolved;
        BoundaryPath fine_psi =
            build_boundary_path(input.value("psi", json{{"source", "zero"}}), base.config.T,
                                counts[levels - 1], base.config.eta, base.root_seed, &psi_resolved);

        std::vector<RunResult> runs(levels);
        for (int l = 0; l < levels; ++l) {
            SchemeConfig& cfg = sims[l].config;
            cfg.k = cfg.T / counts[l];
            cfg.psi = downsample(fine_psi, counts[levels - 1] / counts[l]);
            cfg.snapshot_stride = counts[l] / time_samples;
            sims[l].resolved["k"] = cfg.k;
            sims[l].resolved["psi"] = psi_resolved;
            cfg.validate();
            runs[l] = run_direct(cfg);
            if (runs[l].gate_refused) return kGateRefused;
            if (runs[l].diverged) return kDiverged;
        }

        // Distances between consecutive levels, measured on the finest
        // study lattice.
        const Lattice fine_lat = sims[levels - 1].config.lattice();
        const BesovAnalyzer analyzer(fine_lat.h);
        const BesovSpec spec{alpha, p, p};
        const double dt_samples = base.config.T / time_samples;

        std::vector<double> d_besov(levels - 1, 0.0), d_linf_l2(levels - 1, 0.0);
        for (int pair = 0; pair < levels - 1; ++pair) {
            double acc = 0.0;
            double worst = 0.0;
            for (int i = 0; i <= time_samples; ++i) {
                const LatticeField coarse =
                    resample_to_fine(runs[pair].snapshots[i].s, fine_lat);
                const LatticeField fine =
                    resample_to_fine(runs[pair + 1].snapshots[i].s, fine_lat);
                LatticeField diff = coarse;
                for (int m = 0; m <= fine_lat.M; ++m) diff[m] -= fine[m];
                worst = std::max(worst, lp_norm(diff, 2.0));
                if (i < time_samples) {
                    const double norm = analyzer.besov_norm(diff, spec);
                    acc += norm * norm * dt_samples;
                }
            }
            d_besov[pair] = std::sqrt(acc);
            d_linf_l2[pair] = worst;
        }

        const std::string dir = resolve_out_dir(out_dir);
        json summary;
        summary["study"] = {{"levels", levels},        {"time_samples", time_samples},
                            {"safety", safety},        {"alpha", alpha},
                            {"p", p},                  {"step_counts", counts}};
        json rows = json::array();
        std::string csv = "# config " + base.resolved.dump() + "\n";
        csv += "pair,h_coarse,h_fine,d_besov,d_linf_l2,order_besov,order_linf_l2\n";
        for (int pair = 0; pair < levels - 1; ++pair) {
            json row;
            row["pair"] = pair;
            row["h_coarse"] = cfgs[pair].h;
            row["h_fine"] = cfgs[pair + 1].h;
            row["k_coarse"] = sims[pair].config.k;
            row["k_fine"] = sims[pair + 1].config.k;
            row["d_besov"] = d_besov[pair];
            row["d_linf_l2"] = d_linf_l2[pair];
            std::string order_besov = "";
            std::string order_linf = "";
            if (pair > 0) {
                row["order_besov"] = std::log2(d_besov[pair - 1] / d_besov[pair]);
                row["order_linf_l2"] = std::log2(d_linf_l2[pair - 1] / d_linf_l2[pair]);
                order_besov = format_double(std::log2(d_besov[pair - 1] / d_besov[pair]));
                order_linf = format_double(std::log2(d_linf_l2[pair - 1] / d_linf_l2[pair]));
            }
            rows.push_back(row);
            csv += std::to_string(pair) + "," + format_double(cfgs[pair].h) + "," +
                   format_double(cfgs[pair + 1].h) + "," + format_double(d_besov[pair]) + "," +
                   format_double(d_linf_l2[pair]) + "," + order_besov + "," + order_linf + "\n";
        }
        summary["pairs"] = rows;
        json path_info = json::array();
        for (int l = 0; l < levels; ++l) {
            path_info.push_back({{"h", cfgs[l].h},
                                 {"k", sims[l].config.k},
                                 {"psi_min", sims[l].config.psi.min_value()},
                                 {"psi_max", sims[l].config.psi.max_value()},
                                 {"bounded", sims[l].config.psi.min_value() >= 0.0 &&
                                                 sims[l].config.psi.max_value() <= cfgs[l].eta},
                                 {"s_min", runs[l].monitors.s_min},
                                 {"s_max", runs[l].monitors.s_max},
                                 {"energy", runs[l].monitors.energy_functional()}});
        }
        summary["levels_detail"] = path_info;
        summary["config"] = base.resolved;
        write_text_file(dir + "/convergence.csv", csv);
        write_text_file(dir + "/convergence.json", summary.dump(2) + "\n");
        return kOk;
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
}

int cmd_converge(const std::string& config_file, const std::string& out_dir,
                 const Overrides& overrides) {
    json input;
    try {
        input = load_json_file(config_file);
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
    return cmd_converge_json(input, out_dir, overrides);
}

int cmd_kernel(double h, const std::string& t_list, int n_max, const std::string& out_dir) {
    try {
        const std::vector<double> times = parse_list(t_list);
        const std::string dir = resolve_out_dir(out_dir);
        json cfg;
        cfg["h"] = h;
        cfg["t_list"] = times;
        cfg["n_max"] = n_max;
        std::string csv = "# config " + cfg.dump() + "\n";
        csv += "t,n,value,mass\n";
        for (double t : times) {
            const int spread = static_cast<int>(std::ceil(8.0 * std::sqrt(std::max(2.0 * t, 1e-12)) / h));
            const int n_ext = std::max(n_max, spread) + 64;
            const std::vector<double> row = hd_row(t, h, n_ext);
            double mass = row[0];
            for (int n = 1; n <= n_ext; ++n) mass += 2.0 * row[n];
            mass *= h;
            for (int n = 0; n <= n_max; ++n)
                csv += format_double(t) + "," + std::to_string(n) + "," + format_double(row[n]) +
                       "," + format_double(mass) + "\n";
        }
        write_text_file(dir + "/kernel.csv", csv);
        return kOk;
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
}

int cmd_besov(const std::string& h_list, const std::string& p_list, double alpha_offset,
              const std::string& out_dir) {
    try {
        const std::vector<double> meshes = parse_list(h_list.empty() ? "0.2,0.1,0.05,0.025" : h_list);
        const std::vector<double> ps = parse_list(p_list.empty() ? "1,2" : p_list);
        const std::string dir = resolve_out_dir(out_dir);
        json cfg;
        cfg["h_list"] = meshes;
        cfg["p_list"] = ps;
        cfg["alpha_offset"] = alpha_offset;
        std::string csv = "# config " + cfg.dump() + "\n";
        csv += "h,alpha,p,q,value\n";
        for (double h : meshes) {
            const BesovAnalyzer analyzer(h);
            IndexedField delta{h, 0, {1.0 / h}};
            for (double p : ps) {
                const double threshold = 1.0 / p - 1.0;
                for (double alpha : {threshold - alpha_offset, threshold + alpha_offset}) {
                    const double value = analyzer.besov_norm(delta, BesovSpec{alpha, p, p});
                    csv += format_double(h) + "," + format_double(alpha) + "," + format_double(p) +
                           "," + format_double(p) + "," + format_double(value) + "\n";
                }
            }
        }
        write_text_file(dir + "/besov_sweep.csv", csv);
        return kOk;
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
}

int cmd_fk_json(const json& input, const std::string& out_dir, const Overrides& overrides) {
    try {
        const double h = input.value("h", 0.1);
        const double T = input.value("T", 0.1);
        const int M = input.value("M", 200);
        const long n_samples = input.value("n_samples", 100000L);
        const std::uint64_t seed = overrides.seed ? *overrides.seed : input.value("seed", std::uint64_t{7});
        const Lattice lat(h, M);

        // Heat problem with optional boundary data and initial bump.
        const json s0_spec = input.value("s0", json{{"family", "bump"},
                                                    {"amplitude", 0.5},
                                                    {"center", 1.0},
                                                    {"width", 0.5}});
        const LatticeField s0 = build_field(s0_spec, lat, "s0");
        json psi_resolved;
        const double k_ref = 0.25 * h * h;
        const int ref_steps = static_cast<int>(std::ceil(T / k_ref));
        BoundaryPath psi = build_boundary_path(input.value("psi", json{{"source", "zero"}}), T,
                                               ref_steps, input.value("eta", 1.0), seed, &psi_resolved);

        // Deterministic reference: explicit heat stepping, Richardson-
        // extrapolated against a half-step run so its own time error is
        // quadratically small compared with the Monte Carlo CI widths.
        auto ftcs_history = [&](int steps, const BoundaryPath& boundary) {
            std::vector<LatticeField> hist;
            hist.reserve(steps + 1);
            LatticeField u = s0;
            u[0] = boundary.values[0];
            hist.push_back(u);
            const double ratio = (T / steps) / (h * h);
            for (int n = 0; n < steps; ++n) {
                LatticeField next = LatticeField::zeros(lat);
                for (int m = 1; m < M; ++m)
                    next[m] = u[m] + ratio * (u[m + 1] - 2.0 * u[m] + u[m - 1]);
                next[M] = u[M] + ratio * (0.0 - 2.0 * u[M] + u[M - 1]);
                next[0] = boundary.values[n + 1];
                u = std::move(next);
                hist.push_back(u);
            }
            return hist;
        };
        const std::vector<LatticeField> u_coarse = ftcs_history(ref_steps, psi);
        BoundaryPath psi_half = psi;
        psi_half.times.assign(2 * ref_steps + 1, 0.0);
        psi_half.values.assign(2 * ref_steps + 1, 0.0);
        for (int n = 0; n <= 2 * ref_steps; ++n) {
            psi_half.times[n] = 0.5 * n * (T / ref_steps);
            const int lo = n / 2;
            psi_half.values[n] =
                n % 2 == 0 ? psi.values[lo] : 0.5 * (psi.values[lo] + psi.values[lo + 1]);
        }
        const std::vector<LatticeField> u_fine = ftcs_history(2 * ref_steps, psi_half);
        std::vector<LatticeField> u_hist = u_coarse;
        for (int n = 0; n <= ref_steps; ++n)
            for (int m = 0; m <= M; ++m)
                u_hist[n][m] = 2.0 * u_fine[2 * n][m] - u_coarse[n][m];

        json probes = input.value("probes", json::array({json{{"t", T}, {"x", 10 * h}}}));
        GeneratorSpec spec = GeneratorSpec::heat(h, T);
        json results = json::array();
        bool all_within = true;
        int probe_index = 0;
        for (const json& probe : probes) {
            const double t = probe.at("t").get<double>();
            const double x = probe.at("x").get<double>();
            // Backward problem matching u(t, x): terminal data s0 at
            // horizon t, reversed boundary data.
            GeneratorSpec probe_spec = spec;
            probe_spec.horizon = t;
            probe_spec.terminal = [&s0, h, M](double y) {
                const long node = std::lround(y / h);
                return node <= M ? s0[static_cast<int>(node)] : 0.0;
            };
            probe_spec.boundary = [&psi, t](double sigma) {
                const double forward = std::max(t - sigma, 0.0);
                const double pos = forward / psi.dt();
                const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, psi.steps() - 1);
                const double frac = pos - lo;
                return (1.0 - frac) * psi.values[lo] + frac * psi.values[lo + 1];
            };
            const FkEstimate est =
                fk_estimate(probe_spec, 0.0, x, n_samples, derive_seed(seed, "fk-probe", probe_index));
            const int step = static_cast<int>(std::llround(t / (T / ref_steps)));
            const double deterministic = u_hist[step][static_cast<int>(std::llround(x / h))];
            const double tol = 3.0 * est.stddev / std::sqrt(static_cast<double>(n_samples));
            const bool ok = std::abs(est.mean - deterministic) <= std::max(tol, 1e-12);
            all_within = all_within && ok;
            results.push_back({{"t", t},
                               {"x", x},
                               {"mean", est.mean},
                               {"ci95", est.ci95},
                               {"n", est.n},
                               {"deterministic", deterministic},
                               {"within_3_sigma", ok}});
            ++probe_index;
        }
        const std::string dir = resolve_out_dir(out_dir);
        json out;
        out["config"] = {{"h", h}, {"T", T},       {"M", M},          {"n_samples", n_samples},
                         {"seed", seed}, {"s0", s0_spec}, {"psi", psi_resolved}};
        out["probes"] = results;
        out["all_within_3_sigma"] = all_within;
        write_text_file(dir + "/fk_verify.json", out.dump(2) + "\n");
        return kOk;
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
}

int cmd_fk(const std::string& config_file, const std::string& out_dir, const Overrides& overrides) {
    json input;
    try {
        input = load_json_file(config_file);
    } catch (const std::exception& e) {
        return fail_schema(e);
    }
    return cmd_fk_json(input, out_dir, overrides);
}

}  // namespace rdlattice::cli
