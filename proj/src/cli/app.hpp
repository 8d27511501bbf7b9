#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rdlattice/boundary.hpp"
#include "rdlattice/solver.hpp"

namespace rdlattice::cli {

using json = nlohmann::ordered_json;

/// Stable exit-code contract of every subcommand.
enum ExitCode : int {
    kOk = 0,
    kIoOrSchemaError = 1,
    kGateRefused = 2,
    kDiverged = 3,
};

/// Flag-level overrides; flags win over the config file, the config
/// file wins over defaults.
struct Overrides {
    std::optional<std::uint64_t> seed;
    bool allow_unstable = false;
};

/// Output directory resolution: --out flag, else the RDLAT_OUT
/// environment variable, else ./rdlat_out.
std::string resolve_out_dir(const std::string& flag_value);

/// A scheme configuration materialized from JSON together with the
/// fully resolved document (defaults filled in, seeds pinned) that gets
/// embedded into every output file.
struct ResolvedSimulation {
    SchemeConfig config;
    json resolved;
    std::uint64_t root_seed = 0;
};

ResolvedSimulation resolve_simulation(const json& input, const Overrides& overrides);

/// Boundary path construction shared by simulate/converge: the path is
/// always generated on the finest grid a command needs and downsampled
/// from there.
BoundaryPath build_boundary_path(const json& psi_spec, double T, int steps, double eta,
                                 std::uint64_t root_seed, json* resolved);

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 const Overrides& overrides);
int cmd_simulate_json(const json& input, const std::string& out_dir, const Overrides& overrides);

int cmd_converge(const std::string& config_file, const std::string& out_dir,
                 const Overrides& overrides);
int cmd_converge_json(const json& input, const std::string& out_dir, const Overrides& overrides);

int cmd_kernel(double h, const std::string& t_list, int n_max, const std::string& out_dir);

int cmd_besov(const std::string& h_list, const std::string& p_list, double alpha_offset,
              const std::string& out_dir);

int cmd_fk(const std::string& config_file, const std::string& out_dir, const Overrides& overrides);
int cmd_fk_json(const json& input, const std::string& out_dir, const Overrides& overrides);

}  // namespace rdlattice::cli
