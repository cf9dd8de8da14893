// Command line driver: high-fidelity solves, offline POD, online reduced
// runs, sparse grid surrogates, trajectory diagnostics, and the preset
// experiment suites.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llgrom/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

llgrom::ExperimentConfig resolve_config(const CommonOpts& opts) {
    llgrom::KeyValueConfig kv;
    if (!opts.config_file.empty()) {
        kv = llgrom::KeyValueConfig::parse_file(opts.config_file);
    }
    for (const auto& entry : opts.overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw llgrom::ConfigError("--set expects key=value, got '" +
                                      entry + "'");
        }
        kv.set(entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (opts.seed_set) {
        kv.set("sampling.seed", std::to_string(opts.seed));
    }
    return llgrom::ExperimentConfig::from_config(kv);
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out = true) {
    cmd->add_option("--config", opts.config_file, "configuration file");
    cmd->add_option("--set", opts.overrides,
                    "override a config entry (key=value, repeatable)");
    if (with_out) {
        cmd->add_option("--out", opts.out_dir, "output directory")->required();
    }
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&opts](std::uint64_t v) {
            opts.seed = v;
            opts.seed_set = true;
        },
        "root seed (overrides sampling.seed)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced order modeling toolkit for the parametric LLG equation"};
    app.require_subcommand(1);

    CommonOpts hf_opts, pod_opts, rom_opts, sg_opts, exp_opts;
    std::string pod_snapshots, rom_bases;
    std::string metrics_traj, metrics_out;
    std::string experiment_name;

    auto* hf = app.add_subcommand("hf-solve",
                                  "sample parameters and run the tangent "
                                  "plane scheme");
    add_common(hf, hf_opts);

    auto* pod = app.add_subcommand("offline-pod",
                                   "build reduced bases from stored snapshots");
    add_common(pod, pod_opts);
    pod->add_option("--snapshots", pod_snapshots, "snapshot directory")
        ->required();

    auto* rom = app.add_subcommand("online-rom",
                                   "run the Galerkin reduced scheme on test "
                                   "parameters");
    add_common(rom, rom_opts);
    rom->add_option("--bases", rom_bases, "reduced basis directory")
        ->required();

    auto* sg = app.add_subcommand("sg-rbp",
                                  "build the sparse grid surrogate of reduced "
                                  "coefficients");
    add_common(sg, sg_opts);

    auto* metrics = app.add_subcommand("metrics",
                                       "physical diagnostics of a stored "
                                       "trajectory");
    metrics->add_option("--traj", metrics_traj, "trajectory directory")
        ->required();
    metrics->add_option("--out", metrics_out, "output CSV file")->required();

    auto* experiment =
        app.add_subcommand("experiment", "run a preset experiment suite");
    experiment
        ->add_option("name", experiment_name,
                     "relax-1d | relax-nd | sg-conv | switching")
        ->required();
    add_common(experiment, exp_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (hf->parsed()) {
            llgrom::run_hf_solve(resolve_config(hf_opts), hf_opts.out_dir);
        } else if (pod->parsed()) {
            llgrom::run_offline_pod(resolve_config(pod_opts), pod_snapshots,
                                    pod_opts.out_dir);
        } else if (rom->parsed()) {
            llgrom::run_online_rom(resolve_config(rom_opts), rom_bases,
                                   rom_opts.out_dir);
        } else if (sg->parsed()) {
            llgrom::run_sgrbp_stage(resolve_config(sg_opts), sg_opts.out_dir);
        } else if (metrics->parsed()) {
            llgrom::run_metrics_stage(metrics_traj, metrics_out);
        } else if (experiment->parsed()) {
            llgrom::run_experiment(experiment_name, resolve_config(exp_opts),
                                   exp_opts.out_dir);
        }
    } catch (const llgrom::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const llgrom::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
