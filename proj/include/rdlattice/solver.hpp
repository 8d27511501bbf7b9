#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdlattice/boundary.hpp"
#include "rdlattice/heat_kernel.hpp"
#include "rdlattice/lattice.hpp"

namespace rdlattice {

/// Physical and discretization data of one run. The scaled regime
/// A = 1, B = +-1 is enforced unless allow_general_B is set; even then
/// B > 0 requires B < 1/eta.
struct SchemeConfig {
    double A = 1.0;
    double B = -1.0;
    double lambda = 1.0;  // reaction rate
    double eta = 1.0;     // boundary barrier
    double h = 0.1;
    double k = 1e-3;
    double T = 0.1;
    int M = 100;
    TruncationPolicy truncation = TruncationPolicy::ZeroExtension;
    LatticeField s0;
    LatticeField c0;
    BoundaryPath psi;
    int snapshot_stride = 1;
    bool allow_unstable = false;
    bool allow_general_B = false;

    Lattice lattice() const { return Lattice(h, M); }
    int steps() const;
    double porosity(double c) const { return A + B * c; }
    double c0_min() const { return c0.min(); }
    double c0_max() const { return c0.max(); }
    double phi_min() const { return B >= 0.0 ? porosity(c0_min()) : porosity(c0_max()); }
    double phi_max() const { return B >= 0.0 ? porosity(c0_max()) : porosity(c0_min()); }

    /// Throws on violated structural requirements; returns warnings
    /// (non-fatal observations such as scaled porosity outside (0,1)).
    std::vector<std::string> validate() const;
};

/// Largest admissible time step of the explicit scheme and the verdict
/// for the configured k. For B < 0:
///   k_max = min(h^2/2, h^2 / (2 + lambda c0_max h^2 (1 - B eta)));
/// for 0 < B < 1/eta:
///   k_max = min(h^2/2, h^2 / (2 + phi_max/phi_min + lambda c0_max h^2)).
struct StabilityReport {
    bool stable = false;
    double k_max = 0.0;
    double diffusion_bound = 0.0;  // h^2/2
    double reaction_bound = 0.0;   // branch-dependent second bound
};

StabilityReport check_stability(const SchemeConfig& config);

/// Running extrema and energy diagnostics accumulated over a trajectory.
struct Monitors {
    double s_min = 0.0, s_max = 0.0;
    double c_min = 0.0, c_max = 0.0;
    double sup_l2_sq_s = 0.0;       // sup_n || s^n ||_{L^2}^2
    double grad_energy_acc = 0.0;   // sum_n k || D^+ s^n ||_{L^2}^2
    double tail_ratio = 0.0;        // max over steps of edge |s| / running sup |s|
    long range_violations = 0;      // nodes outside [0, eta) x [0, c0_max]

    double energy_functional() const { return sup_l2_sq_s + grad_energy_acc; }
};

struct TrajectorySnapshot {
    int step = 0;
    double t = 0.0;
    LatticeField s;
    LatticeField c;
};

struct RunResult {
    bool gate_refused = false;
    StabilityReport gate;
    bool diverged = false;
    int diverged_step = -1;
    int diverged_node = -1;
    Monitors monitors;
    std::vector<TrajectorySnapshot> snapshots;

    const TrajectorySnapshot& final_snapshot() const { return snapshots.back(); }
};

struct SchemeState {
    int n = 0;
    LatticeField s;
    LatticeField c;
};

/// One explicit update of (s, c). The s-update is the conservative-form
/// three-point scheme whose coefficients are nonnegative under the
/// stability gate and sum to 1 - lambda k c (1 - B s); the c-update is
/// the exponential factor exp(-lambda k s phi(c)). Boundary: s takes the
/// next boundary sample, c at the boundary uses the current one.
/// Returns the first node index that became non-finite, if any.
std::optional<int> step_direct(SchemeState& state, const SchemeConfig& config);

/// March the scheme over T/k steps, recording snapshots every
/// snapshot_stride steps (the initial and final states are always kept)
/// and accumulating monitors. Refuses to run when the gate fails unless
/// allow_unstable is set.
RunResult run_direct(const SchemeConfig& config);

/// Provider of the boundary-driven heat part u for the splitting solver.
enum class UProviderKind {
    Ftcs,    // explicit heat stepping with the solver's own k (default)
    Kernel,  // convolution of the boundary path against the kernel derivative
};

struct SplitState {
    int n = 0;
    LatticeField u;
    LatticeField v;
    LatticeField c;
};

/// One explicit update of the splitting variables: v absorbs the
/// nonlinear remainder (zero boundary, sources fed by u and its
/// differences), c advances with the same exponential factor as the
/// direct scheme evaluated on u + v, and u is replaced by the provided
/// next heat part. Returns the first non-finite node of u + v, if any.
std::optional<int> step_split(SplitState& state, const SchemeConfig& config,
                              const LatticeField& u_next);

struct SplitRunResult {
    RunResult combined;                       // snapshots hold s = u + v
    std::vector<TrajectorySnapshot> u_parts;  // u in .s, v in .c (same strides)
};

/// Splitting solver: u solves the boundary-driven heat equation, v the
/// nonlinear remainder with zero boundary and initial data s0; c evolves
/// with the same exponential update as the direct scheme applied to u+v,
/// so the recombined trajectory matches run_direct exactly when the two
/// u-routes coincide (psi = 0) and to one time-order otherwise.
SplitRunResult run_split(const SchemeConfig& config, UProviderKind provider = UProviderKind::Ftcs);

/// Closed-form calcite concentration from the accumulated exposure
/// integral I(x) = int_0^t s(tau, x) dtau:
///   c(t,x) = A c0 / (phi(c0) e^{lambda A I} - B c0).
/// Throws std::domain_error on a nonpositive denominator.
LatticeField c_explicit(const LatticeField& c0, const LatticeField& s_time_integral, double A,
                        double B, double lambda);

/// Time local truncation error: the finer-k reference solution is
/// inserted into the coarse one-step update and the residual
///   tau^n = (s_ref(t_{n+1}) - OneStep_k[s_ref(t_n), c_ref(t_n)]) / k
/// is reported per coarse step (max over interior nodes).
struct LteResult {
    std::vector<double> per_step_max;
    double overall_max = 0.0;
};

LteResult local_truncation_error(const SchemeConfig& coarse, int refine_factor);

}  // namespace rdlattice
