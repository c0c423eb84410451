#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

using namespace cli;

// Binds the kernel/dist flag set of a subcommand; list-valued flags come
// in as comma-separated strings and are converted after the parse.
struct KernelDistFlags {
    CLI::App* cmd = nullptr;
    KernelSpec* kernel = nullptr;
    DistSpec* dist = nullptr;
    std::string a, b, lambda, values, weights, seeds;
    std::vector<std::uint64_t>* seed_list = nullptr;

    void add(CLI::App* app, KernelSpec* k, DistSpec* d,
             std::vector<std::uint64_t>* seeds_out = nullptr) {
        cmd = app;
        kernel = k;
        dist = d;
        seed_list = seeds_out;
        app->add_option("--kernel", k->family,
                        "kernel family: product | sum | zero | block | block_doubleexp | finite_rank");
        app->add_option("--a", a, "block amplitudes a_n, comma separated");
        app->add_option("--b", b, "block support lengths b_n, comma separated");
        app->add_option("--de-a", k->de_a, "block_doubleexp amplitude a");
        app->add_option("--de-b", k->de_b, "block_doubleexp target limsup b");
        app->add_option("--lambda", lambda, "finite_rank eigenvalues, comma separated");
        app->add_option("--phi", k->phi, "finite_rank basis: legendre | hermite | identity | auto");
        app->add_option("--scale", k->scale, "multiply the kernel by this factor");
        app->add_option("--dist", d->name, "input law: rademacher | uniform01 | gaussian01 | discrete");
        app->add_option("--dist-values", values, "discrete support, comma separated");
        app->add_option("--dist-weights", weights, "discrete weights, comma separated");
        if (seeds_out)
            app->add_option("--seeds", seeds, "seed list, e.g. 1..20 or 3,5,9");
    }

    void apply() {
        if (cmd->count("--a")) kernel->a = parse_doubles(a);
        if (cmd->count("--b")) kernel->b = parse_doubles(b);
        if (cmd->count("--lambda")) kernel->lambdas = parse_doubles(lambda);
        if (cmd->count("--dist-values")) dist->values = parse_doubles(values);
        if (cmd->count("--dist-weights")) dist->weights = parse_doubles(weights);
        if (seed_list && cmd->count("--seeds")) *seed_list = parse_seed_list(seeds);
    }
};

void add_common(CLI::App* cmd, CommonOpts* common, std::string* config_path) {
    cmd->add_option("--out", common->out, "output directory (default: $ULIL_OUT)");
    cmd->add_option("--workers", common->workers, "worker threads for independent units");
    cmd->add_option("--seed", common->seed, "seed for estimator sampling");
    cmd->add_option("--config", *config_path, "flat key = value file mirroring the flags");
}

// The config file provides values under the flags' precedence: defaults,
// then file, then explicit flags. Files are applied before the parse.
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for degenerate pair statistics and their "
                 "iterated-logarithm normalization"};
    app.require_subcommand(0, 1);

    CommonOpts common;
    common.out = default_out_dir();
    std::string config_path;

    SimulateParams sim;
    ConditionsParams cond;
    ChaosNormParams chaos;
    BoundsParams bounds;
    LimitSetParams lset;
    std::string rerun_manifest;
    std::string chaos_matrix_file, bounds_matrix_file;

    // preload config values so explicit flags win
    std::string preload = find_config_arg(argc, argv);
    if (!preload.empty()) {
        try {
            KeyValues kv = read_flat_config(preload);
            load_common(kv, common);
            load_params(kv, sim);
            load_params(kv, cond);
            load_params(kv, chaos);
            load_params(kv, bounds);
            load_params(kv, lset);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return cli::kExitConfig;
        }
    }

    CLI::App* catalog = app.add_subcommand("catalog", "list the kernel catalog");
    (void)catalog;

    CLI::App* conditions =
        app.add_subcommand("conditions", "certify canonicality, moment growth and the norm bound");
    KernelDistFlags cond_flags;
    cond_flags.add(conditions, &cond.kernel, &cond.dist);
    conditions->add_option("--probes", cond.probes, "canonicality probe count");
    conditions->add_option("--mc-samples", cond.mc_samples, "Monte Carlo samples per estimate");
    conditions->add_option("--operator-m", cond.operator_m, "sample side for the empirical norm");
    add_common(conditions, &common, &config_path);

    CLI::App* simulate = app.add_subcommand("simulate", "dyadic-checkpoint trajectories");
    KernelDistFlags sim_flags;
    sim_flags.add(simulate, &sim.kernel, &sim.dist, &sim.seeds);
    simulate->add_option("--variant", sim.variant,
                         "plain | randomized | decoupled | decoupled_randomized");
    simulate->add_option("--engine", sim.engine, "generic | separable (default by kernel)");
    simulate->add_option("--max-exponent", sim.max_exponent, "checkpoints at n = 2^k, k <= this");
    simulate->add_option("--burn-in", sim.burn_in, "discard checkpoints with k <= this");
    add_common(simulate, &common, &config_path);

    CLI::App* chaos_cmd = app.add_subcommand("chaos-norm", "constrained bilinear norm of a matrix");
    chaos_cmd->add_option("--matrix", chaos.matrix, "inline rows, e.g. \"1,0;0,1\"");
    chaos_cmd->add_option("--matrix-file", chaos_matrix_file, "CSV file, one row per line");
    chaos_cmd->add_option("--t", chaos.t, "budget parameter t");
    chaos_cmd->add_option("--restarts", chaos.restarts, "alternating maximization restarts");
    chaos_cmd->add_flag("--oracle", chaos.oracle, "also run the grid oracle (small matrices)");
    chaos_cmd->add_option("--grid-step", chaos.grid_step, "oracle grid step (<= 0.1)");
    add_common(chaos_cmd, &common, &config_path);

    CLI::App* bounds_cmd = app.add_subcommand("bounds", "concentration-bound calculators");
    bounds_cmd->add_option("--type", bounds.type, "talagrand | prohorov | bernstein | latala");
    bounds_cmd->add_option("--t", bounds.t, "deviation level t");
    bounds_cmd->add_option("--u", bounds.u, "uniform bound U");
    bounds_cmd->add_option("--v", bounds.v, "weak variance V (talagrand)");
    bounds_cmd->add_option("--bigk", bounds.bigk, "universal constant K (talagrand)");
    bounds_cmd->add_option("--sigma2", bounds.sigma2, "variance parameter");
    bounds_cmd->add_option("--ez-abs", bounds.ez_abs,
                           "E|Z| for the weak-variance form (talagrand)");
    bounds_cmd->add_option("--matrix", bounds.matrix, "inline matrix rows (latala)");
    bounds_cmd->add_option("--matrix-file", bounds_matrix_file, "CSV matrix file (latala)");
    bounds_cmd->add_option("--c", bounds.c, "chaos lower-bound constant c");
    bounds_cmd->add_option("--mode", bounds.mode, "latala: exhaustive | mc");
    bounds_cmd->add_option("--samples", bounds.samples, "Monte Carlo sample count");
    add_common(bounds_cmd, &common, &config_path);

    CLI::App* limit_set = app.add_subcommand("limit-set", "limit-set estimate of plain trajectories");
    KernelDistFlags lset_flags;
    lset_flags.add(limit_set, &lset.kernel, &lset.dist, &lset.seeds);
    limit_set->add_option("--engine", lset.engine, "generic | separable (default by kernel)");
    limit_set->add_option("--max-exponent", lset.max_exponent, "checkpoints at n = 2^k, k <= this");
    limit_set->add_option("--burn-in", lset.burn_in, "discard checkpoints with k <= this");
    limit_set->add_option("--gram-m", lset.gram_m, "orthonormality check sample size");
    add_common(limit_set, &common, &config_path);

    CLI::App* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
    rerun->add_option("manifest", rerun_manifest, "path to manifest.cfg")->required();
    rerun->add_option("--out", common.out, "override the output directory");
    rerun->add_option("--workers", common.workers, "override the worker count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitConfig;
    }

    try {
        if (app.got_subcommand(catalog)) return cmd_catalog();
        if (app.got_subcommand(conditions)) {
            cond_flags.apply();
            return cmd_conditions(common, cond);
        }
        if (app.got_subcommand(simulate)) {
            sim_flags.apply();
            return cmd_simulate(common, sim);
        }
        if (app.got_subcommand(chaos_cmd)) {
            if (chaos_cmd->count("--matrix-file"))
                chaos.matrix = read_matrix_file(chaos_matrix_file);
            return cmd_chaos_norm(common, chaos);
        }
        if (app.got_subcommand(bounds_cmd)) {
            if (bounds_cmd->count("--matrix-file"))
                bounds.matrix = read_matrix_file(bounds_matrix_file);
            return cmd_bounds(common, bounds);
        }
        if (app.got_subcommand(limit_set)) {
            lset_flags.apply();
            return cmd_limit_set(common, lset);
        }
        if (app.got_subcommand(rerun))
            return cmd_rerun(rerun_manifest, common, rerun->count("--out") > 0,
                             rerun->count("--workers") > 0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitConfig;
    }

    std::cout << app.help();
    return cli::kExitOk;
}
