#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rdlattice/lattice.hpp"
#include "rdlattice/solver.hpp"

namespace rdlattice {

/// Data of the generic nearest-neighbor backward problem
///   dF/dt + C+ D+ F - C- D- F - V F = 0,  F(T,.) = F0,  F(t,0) = phi(t):
/// jump-rate coefficients C+-(t,x) >= 0 (the chain jumps x -> x +- h at
/// rate C+-/h), discount potential V(t,x) >= 0, terminal data F0 and
/// boundary data phi on the absorbing set x <= 0.
struct GeneratorSpec {
    double h = 0.0;
    std::function<double(double, double)> c_plus;
    std::function<double(double, double)> c_minus;
    std::function<double(double, double)> potential;     // V >= 0
    std::function<double(double)> terminal;              // F0(x)
    std::function<double(double)> boundary;              // phi(t)
    double rate_bound = 0.0;                             // Lambda >= sup (C+ + C-)/h
    double horizon = 0.0;                                // terminal time T
    double time_resolution = 0.0;                        // substep cap for the V integral (0 = single panel)

    void validate() const;

    /// Heat-equation generator: C+- = 1/h, total jump rate 2/h^2.
    static GeneratorSpec heat(double h, double T);
};

/// One trajectory of the continuous-time chain: positions are lattice
/// points, jumps are +-h, and tau is the first hit of x <= 0 (infinity
/// when the chain stays positive up to the horizon).
struct CtmcPath {
    std::vector<double> jump_times;  // event times including the start
    std::vector<double> positions;   // position after each event
    double tau = 0.0;
    bool hit = false;

    double position_at(double t) const;
};

/// Exact-in-law simulation by thinning against the uniform rate bound:
/// candidate events arrive at rate Lambda and are accepted as +-h jumps
/// with probability C+-(t,x)/(h Lambda). Time-dependent rates are
/// handled without any discretization error.
CtmcPath simulate_ctmc(const GeneratorSpec& spec, double t0, double x0, double T,
                       std::uint64_t seed);

struct FkEstimate {
    double mean = 0.0;
    double ci95 = 0.0;    // 1.96 * sample std / sqrt(n)
    double stddev = 0.0;  // per-sample standard deviation
    long n = 0;
};

/// Monte Carlo value of the stochastic representation
///   F(t,x) = E[ e^{-int_t^{tau ^ T} V}  ( F0(X_T) 1{tau > T} + phi(tau) 1{tau <= T} ) ].
/// Samples run on independent derived streams and are reduced chunkwise
/// in index order, so the value is bit-identical for any worker count;
/// the coefficient callbacks must tolerate concurrent read-only calls.
FkEstimate fk_estimate(const GeneratorSpec& spec, double t, double x, long n_samples,
                       std::uint64_t seed);

/// Probabilistic cross-check of the solver: estimates the linearized
/// solution at (t, x) from supplied g- and f-histories (fields per time
/// step, piecewise constant in time). The chain runs in reversed time
/// with drift-tilted rates C+- = 1/h + beta_g+-, discount
/// lambda g (1 - B f), terminal data s0 and reversed boundary data psi.
/// Throws std::domain_error if a tilted rate turns negative.
FkEstimate fk_verify_s_tilde(const SchemeConfig& config, const std::vector<LatticeField>& g_history,
                             const std::vector<LatticeField>& f_history, double t, double x,
                             long n_samples, std::uint64_t seed);

void write_estimate_json(const std::string& file, double t, double x, const FkEstimate& estimate);

}  // namespace rdlattice
