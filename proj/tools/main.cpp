#include <CLI11.hpp>

#include "../src/cli/app.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rdlat: half-line lattice reaction-diffusion solver suite"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    std::string config_file;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool allow_unstable = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config) cmd->add_option("--config", config_file, "JSON config file")->required();
        cmd->add_option("--out", out_dir, "output directory (default: $RDLAT_OUT or ./rdlat_out)");
        cmd->add_option("--seed", seed, "root seed override")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run the explicit (s, c) scheme");
    add_common(simulate, true);
    simulate->add_flag("--allow-unstable", allow_unstable, "run even when the stability gate fails");

    CLI::App* converge = app.add_subcommand("converge", "nested-mesh refinement study");
    add_common(converge, true);

    CLI::App* kernel = app.add_subcommand("kernel", "tabulate the lattice heat kernel");
    kernel->set_help_flag("--help", "print help");
    double kernel_h = 0.1;
    std::string t_list = "0.01,0.1,1";
    int n_max = 30;
    kernel->add_option("--h", kernel_h, "mesh size");
    kernel->add_option("--t-list", t_list, "comma-separated times");
    kernel->add_option("--n-max", n_max, "largest node index");
    kernel->add_option("--out", out_dir, "output directory");

    CLI::App* besov = app.add_subcommand("besov", "delta-function Besov norm sweep");
    std::string h_list;
    std::string p_list;
    double alpha_offset = 0.2;
    besov->add_option("--h-list", h_list, "comma-separated meshes (default 0.2,0.1,0.05,0.025)");
    besov->add_option("--p-list", p_list, "comma-separated integrability exponents (default 1,2)");
    besov->add_option("--alpha-offset", alpha_offset, "offset around the critical 1/p - 1");
    besov->add_option("--out", out_dir, "output directory");

    CLI::App* fk = app.add_subcommand("fk", "Feynman-Kac heat verification");
    add_common(fk, true);

    CLI11_PARSE(app, argc, argv);

    rdlattice::cli::Overrides overrides;
    if (seed_given) overrides.seed = seed;
    overrides.allow_unstable = allow_unstable;

    if (simulate->parsed()) return rdlattice::cli::cmd_simulate(config_file, out_dir, overrides);
    if (converge->parsed()) return rdlattice::cli::cmd_converge(config_file, out_dir, overrides);
    if (kernel->parsed()) return rdlattice::cli::cmd_kernel(kernel_h, t_list, n_max, out_dir);
    if (besov->parsed()) return rdlattice::cli::cmd_besov(h_list, p_list, alpha_offset, out_dir);
    if (fk->parsed()) return rdlattice::cli::cmd_fk(config_file, out_dir, overrides);
    return rdlattice::cli::kIoOrSchemaError;
}
