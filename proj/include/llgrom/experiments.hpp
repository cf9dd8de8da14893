#ifndef LLGROM_EXPERIMENTS_HPP
#define LLGROM_EXPERIMENTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "llgrom/io.hpp"
#include "llgrom/metrics.hpp"
#include "llgrom/sgrbp.hpp"

namespace llgrom {

// Resolved experiment configuration (dotted keys, see README for the schema).
struct ExperimentConfig {
    int n_div = 8;
    double T = 0.5;
    double tau = 1e-3;
    double tau_online = 0.0;  // 0 means the offline step size
    double alpha = 1.4;
    std::string m0_preset = "relaxation";
    std::string g_preset = "relaxation";
    std::string hext_preset = "zero";
    int s = 1;
    int n_snapshots = 32;
    int n_test = 10;
    std::uint64_t seed = 20250810;
    double eps_sq_m = 1e-5;
    double eps_sq_v = 1e-5;
    double eps_sq_lambda = 1e-5;
    std::string variant = "SS-OG-3x";
    double sg_threshold = 1e-2;
    int sg_degree = 1;

    // experiment-specific knobs
    std::vector<int> online_dims = {3, 6, 9, 15, 21, 30};
    std::vector<double> tau_study_taus = {1e-2, 5e-3, 2.5e-3};
    double tau_study_ref = 2.5e-4;
    int tau_study_j = 30;
    int tau_study_n_test = 5;
    std::vector<int> h_study_ndivs = {4, 8, 16};
    int h_study_ndiv_ref = 32;
    int h_study_n_test = 2;
    bool h_study_with_rom = true;
    std::vector<int> nd_s_list = {1, 10, 100};
    std::vector<double> sg_thresholds = {3e-1, 1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> sg_rb_eps = {1e-1, 1e-6};
    double sg_final_time = 0.2;
    int switching_n_samples = 16;

    static ExperimentConfig from_config(const KeyValueConfig& kv);
    KeyValueConfig to_config() const;
    void validate() const;
};

// Mesh, Gram matrices, noise model and initial condition for a configuration.
struct ProblemSetup {
    TriMesh mesh;
    GramSet grams;
    NoiseModel noise;
    PointFunction m0;
    TpsConfig tps;
};

ProblemSetup make_setup(const ExperimentConfig& cfg, int n_div_override = 0);

PointFunction m0_preset_function(const std::string& name);
PointFunction g_preset_function(const std::string& name);
ExternalField hext_preset_function(const std::string& name);

// Offline phase: snapshot + test trajectories and the three POD bases.
struct OfflineBundle {
    std::vector<ParamVector> train_params;
    std::vector<ParamVector> test_params;
    std::vector<Trajectory> train;
    std::vector<Trajectory> test;
    ReducedBasis basis_m;
    ReducedBasis basis_v;
    ReducedBasis basis_lambda;
};

OfflineBundle run_offline(const ProblemSetup& setup,
                          const ExperimentConfig& cfg);

struct VariantStudyRow {
    int dim = 0;
    RomVariant variant = RomVariant::OG1x;
    double gpod_error = 0.0;
    double min_infsup = 0.0;
    bool failed = false;
};

std::vector<VariantStudyRow> variant_study(const ProblemSetup& setup,
                                           const OfflineBundle& bundle,
                                           const ExperimentConfig& cfg);

struct TauStudyResult {
    std::vector<double> taus;
    std::vector<double> errors;
    std::vector<double> min_infsup;
    double slope = 0.0;
};

TauStudyResult tau_study(const ProblemSetup& setup, const OfflineBundle& bundle,
                         const ExperimentConfig& cfg);

struct HStudyRow {
    int n_div = 0;
    double h = 0.0;
    double hf_error = 0.0;
    double hf_min_infsup = 0.0;
    double gpod_og3x = 0.0;
    double gpod_ssog3x = 0.0;
};

std::vector<HStudyRow> h_study(const ExperimentConfig& cfg);

struct SgConvRow {
    double threshold = 0.0;
    int n_nodes = 0;
    int active_dims = 0;
    double rb_eps_sq = 0.0;
    int rb_dim = 0;
    double error = 0.0;
    double proj_floor = 0.0;
};

std::vector<SgConvRow> sg_convergence_study(const ExperimentConfig& cfg);

struct SwitchingResult {
    std::vector<double> final_avg_mz;           // one per sample
    std::vector<int> histogram_counts;          // bins over [-1, 1], width 0.1
    double rom_unit_modulus_final = 0.0;        // shared test parameter
    double sgrbp_unit_modulus_final = 0.0;
    Eigen::MatrixXd time_metrics;  // per step: t, then diagnostics per method
};

SwitchingResult switching_study(const ExperimentConfig& cfg);

// Per-s singular value curves for the dimension-robustness study.
struct DimensionRobustnessResult {
    std::vector<int> s_values;
    // [s][quantity(m=0,v=1,lambda=2)] -> singular values
    std::vector<std::vector<Eigen::VectorXd>> singular_values;
    double gap_v_s0_s1 = 0.0;  // max log-gap, first curve pair
    double gap_v_s1_s2 = 0.0;  // second curve pair
};

DimensionRobustnessResult dimension_robustness_study(
    const ExperimentConfig& cfg, int n_indices = 30);

// CLI stage entry points; every stage writes a manifest with the resolved
// configuration and input hashes.
void run_hf_solve(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);
void run_offline_pod(const ExperimentConfig& cfg,
                     const std::filesystem::path& snapshot_dir,
                     const std::filesystem::path& out_dir);
void run_online_rom(const ExperimentConfig& cfg,
                    const std::filesystem::path& basis_dir,
                    const std::filesystem::path& out_dir);
void run_sgrbp_stage(const ExperimentConfig& cfg,
                     const std::filesystem::path& out_dir);
void run_metrics_stage(const std::filesystem::path& traj_dir,
                       const std::filesystem::path& out_file);
void run_experiment(const std::string& name, const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir);

}  // namespace llgrom

#endif
