#include "rdlattice/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rdlattice/rng.hpp"

namespace rdlattice {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Drift of the arcsin-transformed state Z = arcsin(2 psi/eta - 1):
//   dZ = [a sec Z + b tan Z] dt + dW,  a = nu1 (2 gamma/eta - 1),  b = nu2^2/2 - nu1.
// The diffusion becomes unit scale; the singular drift is evaluated at
// Z clamped eps away from the poles.
struct LampertiDrift {
    double a, b, eps;

    double operator()(double z) const {
        const double zc = std::clamp(z, -kPi / 2.0 + eps, kPi / 2.0 - eps);
        return a / std::cos(zc) + b * std::tan(zc);
    }
};

// Advance the drift ODE dZ = mu(Z) dt by explicit substeps small enough
// that no single substep moves Z by more than a fixed increment. Near a
// pole this reproduces the square-root escape of the exact flow instead
// of overshooting across the whole domain.
double advance_drift(double z, double dt, const LampertiDrift& mu) {
    constexpr double kMaxMove = 0.05;
    double remaining = dt;
    for (int iter = 0; iter < 100000 && remaining > 0.0; ++iter) {
        const double m = mu(z);
        const double am = std::abs(m);
        double step = remaining;
        if (am * step > kMaxMove) step = kMaxMove / am;
        z += m * step;
        remaining -= step;
    }
    return z;
}

}  // namespace

void PearsonParams::validate() const {
    if (!(nu1 > 0.0)) throw std::invalid_argument("pearson: nu1 must be positive");
    if (!(nu2 >= 0.0)) throw std::invalid_argument("pearson: nu2 must be nonnegative");
    if (!(eta > 0.0)) throw std::invalid_argument("pearson: eta must be positive");
    if (!(gamma > 0.0 && gamma <= eta)) throw std::invalid_argument("pearson: need 0 < gamma <= eta");
    if (!(psi0 >= 0.0 && psi0 <= eta)) throw std::invalid_argument("pearson: psi0 must lie in [0, eta]");
}

double BoundaryPath::sup_abs() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double BoundaryPath::min_value() const { return *std::min_element(values.begin(), values.end()); }
double BoundaryPath::max_value() const { return *std::max_element(values.begin(), values.end()); }

BoundaryPath simulate_pearson(const PearsonParams& params, double T, int N, std::uint64_t seed,
                              PearsonScheme scheme, double drift_truncation_eps) {
    params.validate();
    if (N < 1) throw std::invalid_argument("simulate_pearson: need N >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("simulate_pearson: need T > 0");

    BoundaryPath path;
    path.generator = "pearson";
    path.scheme = to_string(scheme);
    path.seed = seed;
    path.certified_bounded = params.bounded_regime();
    path.times.resize(N + 1);
    path.values.resize(N + 1);

    const double dt = T / N;
    const double sqrt_dt = std::sqrt(dt);
    for (int n = 0; n <= N; ++n) path.times[n] = n * dt;

    NormalSampler rng(seed);

    if (scheme == PearsonScheme::LampertiTruncated) {
        const LampertiDrift mu{params.nu1 * (2.0 * params.gamma / params.eta - 1.0),
                               0.5 * params.nu2 * params.nu2 - params.nu1, drift_truncation_eps};
        double z = std::asin(std::clamp(2.0 * params.psi0 / params.eta - 1.0, -1.0, 1.0));
        path.values[0] = params.psi0;
        for (int n = 0; n < N; ++n) {
            z = advance_drift(z, dt, mu);
            z += params.nu2 > 0.0 ? sqrt_dt * rng.gaussian() : 0.0;
            if (z < -kPi / 2.0 || z > kPi / 2.0) {
                z = std::clamp(z, -kPi / 2.0, kPi / 2.0);
                ++path.clamp_count;
            }
            path.values[n + 1] = 0.5 * params.eta * (1.0 + std::sin(z));
        }
    } else {
        double psi = params.psi0;
        path.values[0] = psi;
        for (int n = 0; n < N; ++n) {
            const double diff = params.nu2 * std::sqrt(std::max(psi * (params.eta - psi), 0.0));
            psi += params.nu1 * (params.gamma - psi) * dt;
            psi += params.nu2 > 0.0 ? diff * sqrt_dt * rng.gaussian() : 0.0;
            if (psi < 0.0 || psi > params.eta) {
                psi = std::clamp(psi, 0.0, params.eta);
                ++path.clamp_count;
            }
            path.values[n + 1] = psi;
        }
    }
    return path;
}

BoundaryPath deterministic_path(DeterministicFamily family, double T, int N, double c0, double beta,
                                double scale, const std::function<double(double)>& callable) {
    if (N < 1) throw std::invalid_argument("deterministic_path: need N >= 1");
    if (family == DeterministicFamily::Power && !(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("deterministic_path: power family needs beta in (0,1]");
    if (family == DeterministicFamily::Sampled && !callable)
        throw std::invalid_argument("deterministic_path: sampled family needs a callable");

    BoundaryPath path;
    path.scheme = "exact";
    path.certified_bounded = false;
    path.times.resize(N + 1);
    path.values.resize(N + 1);
    const double dt = T / N;
    for (int n = 0; n <= N; ++n) {
        const double t = n * dt;
        path.times[n] = t;
        switch (family) {
            case DeterministicFamily::Zero:
                path.generator = "zero";
                path.values[n] = 0.0;
                break;
            case DeterministicFamily::Constant:
                path.generator = "constant";
                path.values[n] = c0;
                break;
            case DeterministicFamily::Power:
                path.generator = "power";
                path.values[n] = scale * std::pow(t, beta);
                break;
            case DeterministicFamily::Sampled:
                path.generator = "sampled";
                path.values[n] = callable(t);
                break;
        }
    }
    return path;
}

double holder_seminorm(const BoundaryPath& path, double beta) {
    const int n_points = static_cast<int>(path.times.size());
    if (n_points < 2) throw std::invalid_argument("holder_seminorm: need at least two samples");
    double best = 0.0;
    for (int n = 0; n < n_points; ++n) {
        for (int m = n + 1; m < n_points; ++m) {
            const double gap = path.times[m] - path.times[n];
            const double ratio = std::abs(path.values[m] - path.values[n]) / std::pow(gap, beta);
            best = std::max(best, ratio);
        }
    }
    return best;
}

BoundaryPath downsample(const BoundaryPath& path, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
    const int N = path.steps();
    if (N % factor != 0) throw std::invalid_argument("downsample: factor must divide the step count");
    BoundaryPath out;
    out.generator = path.generator;
    out.scheme = path.scheme;
    out.seed = path.seed;
    out.certified_bounded = path.certified_bounded;
    out.clamp_count = path.clamp_count;
    for (int n = 0; n <= N; n += factor) {
        out.times.push_back(path.times[n]);
        out.values.push_back(path.values[n]);
    }
    return out;
}

void write_path_csv(const BoundaryPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_path_csv: cannot open " + file);
    out << "t,psi\n";
    char line[96];
    for (std::size_t n = 0; n < path.times.size(); ++n) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", path.times[n], path.values[n]);
        out << line;
    }
}

BoundaryPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_path_csv: cannot open " + file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,psi", 0) != 0)
        throw std::runtime_error("read_path_csv: expected header 't,psi'");
    BoundaryPath path;
    path.generator = "csv";
    path.scheme = "imported";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("read_path_csv: malformed row");
        path.times.push_back(std::stod(line.substr(0, comma)));
        path.values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (path.times.size() < 2) throw std::runtime_error("read_path_csv: path needs at least two rows");
    return path;
}

}  // namespace rdlattice
