#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rdlattice {

/// Parameters of the mean-reverting SDE
///   d psi = nu1 (gamma - psi) dt + nu2 sqrt(psi (eta - psi)) dW
/// whose bounded solutions supply the dynamical Dirichlet data.
struct PearsonParams {
    double nu1 = 1.0;    // mean-reversion rate (1/time)
    double nu2 = 0.0;    // diffusion scale (1/sqrt(time))
    double gamma = 0.5;  // reversion level
    double eta = 1.0;    // upper barrier
    double psi0 = 0.0;   // initial value in [0, eta]

    void validate() const;

    // Feller-type condition under which the process stays in [0, eta]:
    //   min(2 nu1 gamma, 2 nu1 (eta - gamma)) >= nu2^2 eta
    bool bounded_regime() const {
        const double lhs = std::min(2.0 * nu1 * gamma, 2.0 * nu1 * (eta - gamma));
        return lhs >= nu2 * nu2 * eta;
    }
};

enum class PearsonScheme {
    LampertiTruncated,  // default: arcsin transform, drift truncated near the poles
    ProjectedEuler,     // cross-check: plain Euler-Maruyama clamped to [0, eta]
};

inline const char* to_string(PearsonScheme s) {
    return s == PearsonScheme::LampertiTruncated ? "lamperti" : "projected_euler";
}

/// Time series psi(t_n) on the uniform grid t_n = n T / N, n = 0..N.
struct BoundaryPath {
    std::vector<double> times;
    std::vector<double> values;
    std::string generator = "unspecified";
    std::string scheme = "none";
    std::uint64_t seed = 0;
    bool certified_bounded = false;  // generated in the bounded regime
    long clamp_count = 0;            // state-domain excursions folded back

    int steps() const { return static_cast<int>(times.size()) - 1; }
    double horizon() const { return times.back(); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    double sup_abs() const;
    double min_value() const;
    double max_value() const;
};

/// Simulate the SDE path on N uniform steps up to T. In the bounded
/// regime the default scheme keeps every value inside [0, eta] by
/// construction; outside it the path is still produced but flagged
/// non-certified and clamp events are counted.
BoundaryPath simulate_pearson(const PearsonParams& params, double T, int N, std::uint64_t seed,
                              PearsonScheme scheme = PearsonScheme::LampertiTruncated,
                              double drift_truncation_eps = 1e-3);

enum class DeterministicFamily { Zero, Constant, Power, Sampled };

/// Deterministic boundary fixtures: zero, constant c0, scale * t^beta with
/// beta in (0,1], or an arbitrary caller-supplied callable sampled on the grid.
BoundaryPath deterministic_path(DeterministicFamily family, double T, int N, double c0 = 0.0,
                                double beta = 1.0, double scale = 1.0,
                                const std::function<double(double)>& callable = nullptr);

/// Largest increment ratio |psi(t_m)-psi(t_n)| / (t_m-t_n)^beta over all
/// grid pairs n < m (exact for the grid restriction of the path).
double holder_seminorm(const BoundaryPath& path, double beta);

/// Keep every factor-th sample. Refinement studies generate one path at
/// the finest grid and downsample it, so every level shares the same
/// underlying randomness.
BoundaryPath downsample(const BoundaryPath& path, int factor);

void write_path_csv(const BoundaryPath& path, const std::string& file);
BoundaryPath read_path_csv(const std::string& file);

}  // namespace rdlattice
