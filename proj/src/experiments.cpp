#include "llgrom/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace llgrom {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& key) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (...) {
            throw ConfigError(key + ": bad list entry '" + cell + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& key) {
    std::vector<int> out;
    for (double v : parse_double_list(text, key)) {
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string join_list(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        out += std::to_string(v[i]);
        if (i + 1 < v.size()) out += ",";
    }
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        out += format_double(v[i]);
        if (i + 1 < v.size()) out += ",";
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mesh.n_div", "time.T", "time.tau", "time.tau_online", "model.alpha",
        "model.m0_preset", "model.g_preset", "model.hext_preset", "param.s",
        "sampling.n_snapshots", "sampling.n_test", "sampling.seed",
        "pod.eps_sq", "pod.eps_sq_m", "pod.eps_sq_v", "pod.eps_sq_lambda",
        "online.variant", "online.dims", "sg.threshold", "sg.degree",
        "sg.thresholds", "sg.rb_eps_list", "sg.final_time",
        "tau_study.taus", "tau_study.tau_ref", "tau_study.j",
        "tau_study.n_test", "h_study.ndivs", "h_study.ndiv_ref",
        "h_study.n_test", "h_study.with_rom", "nd.s_list",
        "switching.n_samples"};
    return keys;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
    for (const auto& [key, value] : kv.entries()) {
        (void)value;
        if (!known_keys().count(key)) {
            throw ConfigError("unknown config key: " + key);
        }
    }
    ExperimentConfig cfg;
    cfg.n_div = kv.get_int("mesh.n_div", cfg.n_div);
    cfg.T = kv.get_double("time.T", cfg.T);
    cfg.tau = kv.get_double("time.tau", cfg.tau);
    cfg.tau_online = kv.get_double("time.tau_online", cfg.tau_online);
    cfg.alpha = kv.get_double("model.alpha", cfg.alpha);
    cfg.m0_preset = kv.get_string("model.m0_preset", cfg.m0_preset);
    cfg.g_preset = kv.get_string("model.g_preset", cfg.g_preset);
    cfg.hext_preset = kv.get_string("model.hext_preset", cfg.hext_preset);
    cfg.s = kv.get_int("param.s", cfg.s);
    cfg.n_snapshots = kv.get_int("sampling.n_snapshots", cfg.n_snapshots);
    cfg.n_test = kv.get_int("sampling.n_test", cfg.n_test);
    cfg.seed = kv.get_u64("sampling.seed", cfg.seed);
    const double eps_all = kv.get_double("pod.eps_sq", -1.0);
    if (eps_all > 0.0) {
        cfg.eps_sq_m = cfg.eps_sq_v = cfg.eps_sq_lambda = eps_all;
    }
    cfg.eps_sq_m = kv.get_double("pod.eps_sq_m", cfg.eps_sq_m);
    cfg.eps_sq_v = kv.get_double("pod.eps_sq_v", cfg.eps_sq_v);
    cfg.eps_sq_lambda = kv.get_double("pod.eps_sq_lambda", cfg.eps_sq_lambda);
    cfg.variant = kv.get_string("online.variant", cfg.variant);
    if (kv.has("online.dims")) {
        cfg.online_dims = parse_int_list(kv.get_string("online.dims"),
                                         "online.dims");
    }
    cfg.sg_threshold = kv.get_double("sg.threshold", cfg.sg_threshold);
    cfg.sg_degree = kv.get_int("sg.degree", cfg.sg_degree);
    if (kv.has("sg.thresholds")) {
        cfg.sg_thresholds = parse_double_list(kv.get_string("sg.thresholds"),
                                              "sg.thresholds");
    }
    if (kv.has("sg.rb_eps_list")) {
        cfg.sg_rb_eps = parse_double_list(kv.get_string("sg.rb_eps_list"),
                                          "sg.rb_eps_list");
    }
    cfg.sg_final_time = kv.get_double("sg.final_time", cfg.sg_final_time);
    if (kv.has("tau_study.taus")) {
        cfg.tau_study_taus = parse_double_list(kv.get_string("tau_study.taus"),
                                               "tau_study.taus");
    }
    cfg.tau_study_ref = kv.get_double("tau_study.tau_ref", cfg.tau_study_ref);
    cfg.tau_study_j = kv.get_int("tau_study.j", cfg.tau_study_j);
    cfg.tau_study_n_test =
        kv.get_int("tau_study.n_test", cfg.tau_study_n_test);
    if (kv.has("h_study.ndivs")) {
        cfg.h_study_ndivs = parse_int_list(kv.get_string("h_study.ndivs"),
                                           "h_study.ndivs");
    }
    cfg.h_study_ndiv_ref = kv.get_int("h_study.ndiv_ref", cfg.h_study_ndiv_ref);
    cfg.h_study_n_test = kv.get_int("h_study.n_test", cfg.h_study_n_test);
    cfg.h_study_with_rom = kv.get_bool("h_study.with_rom", cfg.h_study_with_rom);
    if (kv.has("nd.s_list")) {
        cfg.nd_s_list = parse_int_list(kv.get_string("nd.s_list"), "nd.s_list");
    }
    cfg.switching_n_samples =
        kv.get_int("switching.n_samples", cfg.switching_n_samples);
    cfg.validate();
    return cfg;
}

KeyValueConfig ExperimentConfig::to_config() const {
    KeyValueConfig kv;
    kv.set("mesh.n_div", std::to_string(n_div));
    kv.set("time.T", format_double(T));
    kv.set("time.tau", format_double(tau));
    kv.set("time.tau_online", format_double(tau_online));
    kv.set("model.alpha", format_double(alpha));
    kv.set("model.m0_preset", m0_preset);
    kv.set("model.g_preset", g_preset);
    kv.set("model.hext_preset", hext_preset);
    kv.set("param.s", std::to_string(s));
    kv.set("sampling.n_snapshots", std::to_string(n_snapshots));
    kv.set("sampling.n_test", std::to_string(n_test));
    kv.set("sampling.seed", std::to_string(seed));
    kv.set("pod.eps_sq_m", format_double(eps_sq_m));
    kv.set("pod.eps_sq_v", format_double(eps_sq_v));
    kv.set("pod.eps_sq_lambda", format_double(eps_sq_lambda));
    kv.set("online.variant", variant);
    kv.set("online.dims", join_list(online_dims));
    kv.set("sg.threshold", format_double(sg_threshold));
    kv.set("sg.degree", std::to_string(sg_degree));
    kv.set("sg.thresholds", join_list(sg_thresholds));
    kv.set("sg.rb_eps_list", join_list(sg_rb_eps));
    kv.set("sg.final_time", format_double(sg_final_time));
    kv.set("tau_study.taus", join_list(tau_study_taus));
    kv.set("tau_study.tau_ref", format_double(tau_study_ref));
    kv.set("tau_study.j", std::to_string(tau_study_j));
    kv.set("tau_study.n_test", std::to_string(tau_study_n_test));
    kv.set("h_study.ndivs", join_list(h_study_ndivs));
    kv.set("h_study.ndiv_ref", std::to_string(h_study_ndiv_ref));
    kv.set("h_study.n_test", std::to_string(h_study_n_test));
    kv.set("h_study.with_rom", h_study_with_rom ? "true" : "false");
    kv.set("nd.s_list", join_list(nd_s_list));
    kv.set("switching.n_samples", std::to_string(switching_n_samples));
    return kv;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(n_div >= 1, "mesh.n_div: must be >= 1");
    require(T > 0.0, "time.T: must be positive");
    require(tau > 0.0, "time.tau: must be positive");
    require(tau_online >= 0.0, "time.tau_online: must be nonnegative");
    require(alpha > 0.0, "model.alpha: must be positive");
    require(m0_preset == "relaxation" || m0_preset == "switching",
            "model.m0_preset: unknown preset '" + m0_preset + "'");
    require(g_preset == "relaxation" || g_preset == "switching",
            "model.g_preset: unknown preset '" + g_preset + "'");
    require(hext_preset == "zero" || hext_preset == "minus_ez",
            "model.hext_preset: unknown preset '" + hext_preset + "'");
    require(s >= 1, "param.s: must be >= 1");
    require(n_snapshots >= 1, "sampling.n_snapshots: must be >= 1");
    require(n_test >= 1, "sampling.n_test: must be >= 1");
    require(eps_sq_m > 0.0 && eps_sq_m < 1.0, "pod.eps_sq_m: must be in (0,1)");
    require(eps_sq_v > 0.0 && eps_sq_v < 1.0, "pod.eps_sq_v: must be in (0,1)");
    require(eps_sq_lambda > 0.0 && eps_sq_lambda < 1.0,
            "pod.eps_sq_lambda: must be in (0,1)");
    parse_variant(variant);
    require(sg_threshold > 0.0, "sg.threshold: must be positive");
    require(sg_degree >= 1, "sg.degree: must be >= 1");
    require(sg_final_time > 0.0, "sg.final_time: must be positive");
}

PointFunction m0_preset_function(const std::string& name) {
    if (name == "relaxation" || name == "switching") {
        return [](const Eigen::Vector2d& x) {
            const double c = 0.9;
            const double u = c * (x.x() - 0.5);
            const double v = c * (x.y() - 0.5);
            return Eigen::Vector3d(u, v, std::sqrt(1.0 - u * u - v * v));
        };
    }
    throw ConfigError("unknown m0 preset: " + name);
}

PointFunction g_preset_function(const std::string& name) {
    if (name == "relaxation") {
        return [](const Eigen::Vector2d& x) {
            const double a = 0.5 * std::sin(M_PI * (x.x() - 0.5));
            const double b = 0.5 * std::sin(M_PI * (x.y() - 0.5));
            return Eigen::Vector3d(a, b, std::sqrt(1.0 - a * a - b * b));
        };
    }
    if (name == "switching") {
        return [](const Eigen::Vector2d& x) {
            const double a = 0.45 * std::sin(M_PI * x.x());
            const double b = 0.45 * std::sin(M_PI * x.y());
            return Eigen::Vector3d(a, b, std::sqrt(1.0 - a * a - b * b));
        };
    }
    throw ConfigError("unknown g preset: " + name);
}

ExternalField hext_preset_function(const std::string& name) {
    if (name == "zero") {
        return {};
    }
    if (name == "minus_ez") {
        return [](double, const Eigen::Vector2d&) {
            return Eigen::Vector3d(0.0, 0.0, -1.0);
        };
    }
    throw ConfigError("unknown hext preset: " + name);
}

ProblemSetup make_setup(const ExperimentConfig& cfg, int n_div_override) {
    ProblemSetup setup;
    setup.mesh =
        build_structured_mesh(n_div_override > 0 ? n_div_override : cfg.n_div);
    setup.grams = assemble_gram(setup.mesh);
    setup.noise = make_noise_model(
        nodal_interpolate(setup.mesh, g_preset_function(cfg.g_preset)),
        hext_preset_function(cfg.hext_preset));
    setup.m0 = m0_preset_function(cfg.m0_preset);
    setup.tps = TpsConfig{cfg.alpha, cfg.T, cfg.tau, true};
    return setup;
}

namespace {

std::vector<Trajectory> run_many(const ProblemSetup& setup,
                                 const std::vector<ParamVector>& params,
                                 const TpsConfig& tps) {
    std::vector<Trajectory> out;
    out.reserve(params.size());
    for (const auto& y : params) {
        out.push_back(
            tps_run(setup.mesh, setup.grams, setup.noise, setup.m0, y, tps));
    }
    return out;
}

}  // namespace

OfflineBundle run_offline(const ProblemSetup& setup,
                          const ExperimentConfig& cfg) {
    OfflineBundle bundle;
    bundle.train_params =
        sample_parameters(cfg.s, cfg.n_snapshots, derive_seed(cfg.seed, "snapshots"));
    bundle.test_params =
        sample_parameters(cfg.s, cfg.n_test, derive_seed(cfg.seed, "test"));
    bundle.train = run_many(setup, bundle.train_params, setup.tps);
    bundle.test = run_many(setup, bundle.test_params, setup.tps);
    bundle.basis_m = pod_compute(
        collect_snapshots(bundle.train, Quantity::Magnetization), setup.grams);
    bundle.basis_v = pod_compute(
        collect_snapshots(bundle.train, Quantity::Velocity), setup.grams);
    bundle.basis_lambda = pod_compute(
        collect_snapshots(bundle.train, Quantity::Multiplier), setup.grams);
    return bundle;
}

std::vector<VariantStudyRow> variant_study(const ProblemSetup& setup,
                                           const OfflineBundle& bundle,
                                           const ExperimentConfig& cfg) {
    const RomVariant variants[] = {RomVariant::OG1x, RomVariant::OG3x,
                                   RomVariant::SSOG1x, RomVariant::SSOG3x};
    std::vector<VariantStudyRow> rows;
    const TpsConfig online{cfg.alpha, cfg.T,
                           cfg.tau_online > 0.0 ? cfg.tau_online : cfg.tau,
                           true};
    for (int dim : cfg.online_dims) {
        for (RomVariant variant : variants) {
            VariantStudyRow row;
            row.dim = dim;
            row.variant = variant;
            try {
                const RomSpaces spaces = build_rom_spaces(
                    setup.mesh, setup.grams, bundle.basis_v,
                    bundle.basis_lambda, bundle.basis_m, variant, dim);
                std::vector<RomTrajectory> roms;
                double min_beta = std::numeric_limits<double>::infinity();
                for (const auto& y : bundle.test_params) {
                    roms.push_back(rom_run(setup.mesh, setup.grams, setup.noise,
                                           spaces, setup.m0, y, online));
                    for (double beta : roms.back().infsup) {
                        min_beta = std::min(min_beta, beta);
                    }
                }
                row.gpod_error =
                    galerkin_pod_error(bundle.test, roms, setup.grams);
                row.min_infsup = min_beta;
            } catch (const std::exception&) {
                row.failed = true;
                row.gpod_error = std::numeric_limits<double>::quiet_NaN();
                row.min_infsup = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

TauStudyResult tau_study(const ProblemSetup& setup, const OfflineBundle& bundle,
                         const ExperimentConfig& cfg) {
    TauStudyResult result;
    result.taus = cfg.tau_study_taus;

    const std::vector<ParamVector> test_params = sample_parameters(
        cfg.s, cfg.tau_study_n_test, derive_seed(cfg.seed, "tau_test"));
    const TpsConfig ref_cfg{cfg.alpha, cfg.T, cfg.tau_study_ref, true};
    std::vector<std::vector<FeVectorField>> reference;
    for (const auto& y : test_params) {
        reference.push_back(
            tps_run(setup.mesh, setup.grams, setup.noise, setup.m0, y, ref_cfg)
                .magnetizations);
    }

    const RomSpaces spaces = build_rom_spaces(
        setup.mesh, setup.grams, bundle.basis_v, bundle.basis_lambda,
        bundle.basis_m, RomVariant::OG3x, cfg.tau_study_j);

    for (double tau : cfg.tau_study_taus) {
        const double ratio = tau / cfg.tau_study_ref;
        const int stride = static_cast<int>(std::llround(ratio));
        if (std::abs(ratio - stride) > 1e-9) {
            throw ConfigError(
                "tau_study.taus: online tau must be an integer multiple of "
                "tau_study.tau_ref");
        }
        const TpsConfig online{cfg.alpha, cfg.T, tau, true};
        std::vector<std::vector<FeVectorField>> approx;
        double min_beta = std::numeric_limits<double>::infinity();
        for (const auto& y : test_params) {
            RomTrajectory rom = rom_run(setup.mesh, setup.grams, setup.noise,
                                        spaces, setup.m0, y, online);
            for (double beta : rom.infsup) {
                min_beta = std::min(min_beta, beta);
            }
            approx.push_back(std::move(rom.full_magnetizations));
        }
        result.errors.push_back(
            rms_h1_error(reference, approx, setup.grams, stride));
        result.min_infsup.push_back(min_beta);
    }
    result.slope = rate_fit(result.taus, result.errors);
    return result;
}

std::vector<HStudyRow> h_study(const ExperimentConfig& cfg) {
    const std::vector<ParamVector> test_params = sample_parameters(
        cfg.s, cfg.h_study_n_test, derive_seed(cfg.seed, "h_test"));

    // reference solution on the finest mesh
    const ProblemSetup ref_setup = make_setup(cfg, cfg.h_study_ndiv_ref);
    std::vector<std::vector<FeVectorField>> reference;
    for (const auto& y : test_params) {
        reference.push_back(tps_run(ref_setup.mesh, ref_setup.grams,
                                    ref_setup.noise, ref_setup.m0, y,
                                    ref_setup.tps)
                                .magnetizations);
    }

    std::vector<HStudyRow> rows;
    for (int n_div : cfg.h_study_ndivs) {
        const ProblemSetup setup = make_setup(cfg, n_div);
        HStudyRow row;
        row.n_div = n_div;
        row.h = setup.mesh.h;

        std::vector<std::vector<FeVectorField>> prolonged;
        double min_beta = std::numeric_limits<double>::infinity();
        std::vector<Trajectory> test_trajs;
        for (const auto& y : test_params) {
            Trajectory traj = tps_run(setup.mesh, setup.grams, setup.noise,
                                      setup.m0, y, setup.tps, true);
            for (double beta : traj.infsup) {
                min_beta = std::min(min_beta, beta);
            }
            std::vector<FeVectorField> lifted;
            lifted.reserve(traj.magnetizations.size());
            for (const auto& m : traj.magnetizations) {
                lifted.push_back(prolongate(setup.mesh, ref_setup.mesh, m));
            }
            prolonged.push_back(std::move(lifted));
            test_trajs.push_back(std::move(traj));
        }
        row.hf_error = rms_h1_error(reference, prolonged, ref_setup.grams, 1);
        row.hf_min_infsup = min_beta;

        if (cfg.h_study_with_rom) {
            ExperimentConfig local = cfg;
            local.n_div = n_div;
            OfflineBundle bundle;
            bundle.train_params = sample_parameters(
                cfg.s, cfg.n_snapshots, derive_seed(cfg.seed, "snapshots"));
            bundle.test_params = test_params;
            bundle.train = run_many(setup, bundle.train_params, setup.tps);
            bundle.test = test_trajs;
            bundle.basis_m = pod_compute(
                collect_snapshots(bundle.train, Quantity::Magnetization),
                setup.grams);
            bundle.basis_v = pod_compute(
                collect_snapshots(bundle.train, Quantity::Velocity),
                setup.grams);
            bundle.basis_lambda = pod_compute(
                collect_snapshots(bundle.train, Quantity::Multiplier),
                setup.grams);

            const int r = std::max(
                1, truncate(bundle.basis_v, cfg.eps_sq_v).dimension() / 3);
            const int budget = 3 * r;
            for (RomVariant variant :
                 {RomVariant::OG3x, RomVariant::SSOG3x}) {
                const RomSpaces spaces = build_rom_spaces(
                    setup.mesh, setup.grams, bundle.basis_v,
                    bundle.basis_lambda, bundle.basis_m, variant,
                    std::min(budget, bundle.basis_v.dimension()));
                std::vector<RomTrajectory> roms;
                for (const auto& y : test_params) {
                    roms.push_back(rom_run(setup.mesh, setup.grams,
                                           setup.noise, spaces, setup.m0, y,
                                           setup.tps));
                }
                const double err =
                    galerkin_pod_error(bundle.test, roms, setup.grams);
                if (variant == RomVariant::OG3x) {
                    row.gpod_og3x = err;
                } else {
                    row.gpod_ssog3x = err;
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SgConvRow> sg_convergence_study(const ExperimentConfig& cfg) {
    ExperimentConfig local = cfg;
    local.T = cfg.sg_final_time;
    const ProblemSetup setup = make_setup(local);

    // offline basis and test set
    OfflineBundle bundle = run_offline(setup, local);

    std::vector<std::pair<double, ReducedBasis>> bases;
    for (double eps : cfg.sg_rb_eps) {
        bases.emplace_back(eps, truncate(bundle.basis_m, eps));
    }

    // high-fidelity coefficient cache over grid nodes, projected onto the
    // largest basis; coarser bases take leading segments
    int k_max = 0;
    for (const auto& [eps, basis] : bases) {
        k_max = std::max(k_max, basis.dimension());
    }
    const ReducedBasis basis_max = truncate_to_dim(bundle.basis_m, k_max);
    const int n_steps = setup.tps.num_steps();

    std::map<std::vector<double>, Eigen::VectorXd> cache;
    auto node_coeffs = [&](const Eigen::VectorXd& node) {
        std::vector<double> key(node.data(), node.data() + node.size());
        auto it = cache.find(key);
        if (it == cache.end()) {
            const Trajectory traj =
                tps_run(setup.mesh, setup.grams, setup.noise, setup.m0,
                        ParamVector(node), setup.tps);
            Eigen::VectorXd coeffs(
                static_cast<Eigen::Index>(n_steps + 1) * k_max);
            for (int n = 0; n <= n_steps; ++n) {
                coeffs.segment(static_cast<Eigen::Index>(n) * k_max, k_max) =
                    basis_max.phi.transpose() *
                    (setup.grams.q_vec * traj.magnetizations[n].coeffs);
            }
            it = cache.emplace(std::move(key), std::move(coeffs)).first;
        }
        return it->second;
    };

    std::vector<SgConvRow> rows;
    for (double threshold : cfg.sg_thresholds) {
        const MultiIndexSet lambda =
            build_index_set(cfg.s, threshold, cfg.sg_degree);
        const SparseGridOp op(lambda, cfg.sg_degree);

        std::vector<Eigen::VectorXd> values_max;
        values_max.reserve(op.num_nodes());
        for (const auto& node : op.nodes()) {
            values_max.push_back(node_coeffs(node));
        }

        for (const auto& [eps, basis] : bases) {
            const int k = basis.dimension();
            // restrict cached coefficients to the leading k modes
            std::vector<Eigen::VectorXd> values(values_max.size());
            for (size_t i = 0; i < values_max.size(); ++i) {
                Eigen::VectorXd v(static_cast<Eigen::Index>(n_steps + 1) * k);
                for (int n = 0; n <= n_steps; ++n) {
                    v.segment(static_cast<Eigen::Index>(n) * k, k) =
                        values_max[i].segment(
                            static_cast<Eigen::Index>(n) * k_max, k);
                }
                values[i] = std::move(v);
            }

            double acc = 0.0;
            for (size_t m = 0; m < bundle.test_params.size(); ++m) {
                const Eigen::VectorXd flat =
                    op.interpolate(values, bundle.test_params[m].y);
                for (int n = 1; n <= n_steps; ++n) {
                    const Eigen::VectorXd rec =
                        basis.phi *
                        flat.segment(static_cast<Eigen::Index>(n) * k, k);
                    const Eigen::VectorXd diff =
                        bundle.test[m].magnetizations[n].coeffs - rec;
                    acc += diff.dot(setup.grams.q_vec * diff);
                }
            }
            SgConvRow row;
            row.threshold = threshold;
            row.n_nodes = op.num_nodes();
            row.active_dims = op.num_active_dimensions();
            row.rb_eps_sq = eps;
            row.rb_dim = k;
            row.error = std::sqrt(
                acc / (static_cast<double>(bundle.test_params.size()) *
                       n_steps));
            row.proj_floor =
                projection_error(basis, setup.grams, bundle.test,
                                 Quantity::Magnetization);
            rows.push_back(row);
        }
    }
    return rows;
}

SwitchingResult switching_study(const ExperimentConfig& cfg) {
    ExperimentConfig local = cfg;
    local.m0_preset = "switching";
    local.g_preset = "switching";
    local.hext_preset = "minus_ez";
    const ProblemSetup setup = make_setup(local);

    SwitchingResult result;
    const std::vector<ParamVector> samples = sample_parameters(
        local.s, local.switching_n_samples, derive_seed(local.seed, "switching"));

    std::vector<Trajectory> trajs;
    for (const auto& y : samples) {
        trajs.push_back(
            tps_run(setup.mesh, setup.grams, setup.noise, setup.m0, y, setup.tps));
        const auto diag = physical_diagnostics(trajs.back().magnetizations.back(),
                                               setup.mesh, setup.grams);
        result.final_avg_mz.push_back(diag.avg_mz);
    }
    result.histogram_counts = histogram(result.final_avg_mz, -1.0, 1.0, 20);

    // shared reduced basis for both surrogates
    ReducedBasis basis_m = pod_compute(
        collect_snapshots(trajs, Quantity::Magnetization), setup.grams);
    ReducedBasis basis_v =
        pod_compute(collect_snapshots(trajs, Quantity::Velocity), setup.grams);
    ReducedBasis basis_lambda = pod_compute(
        collect_snapshots(trajs, Quantity::Multiplier), setup.grams);
    const ReducedBasis basis_m_cut = truncate(basis_m, local.eps_sq_m);
    const ReducedBasis basis_v_cut = truncate(basis_v, local.eps_sq_v);

    const int budget =
        std::min({basis_v_cut.dimension(), basis_lambda.dimension()});
    const RomSpaces spaces =
        build_rom_spaces(setup.mesh, setup.grams, basis_v, basis_lambda,
                         basis_m_cut, RomVariant::SSOG1x, budget);

    const std::vector<ParamVector> test = sample_parameters(
        local.s, 1, derive_seed(local.seed, "switching_test"));
    const Trajectory hf = tps_run(setup.mesh, setup.grams, setup.noise,
                                  setup.m0, test[0], setup.tps);
    const RomTrajectory rom = rom_run(setup.mesh, setup.grams, setup.noise,
                                      spaces, setup.m0, test[0], setup.tps);

    const MultiIndexSet lambda_set =
        build_index_set(local.s, local.sg_threshold, local.sg_degree);
    const SparseGridOp op(lambda_set, local.sg_degree);
    const SgRbpSurrogate surrogate =
        sgrbp_build(setup.mesh, setup.grams, setup.noise, setup.m0, setup.tps,
                    basis_m_cut, op);
    const std::vector<FeVectorField> sg_fields = sgrbp_eval(surrogate, test[0]);

    const int n_steps = setup.tps.num_steps();
    result.time_metrics.resize(n_steps + 1, 10);
    for (int n = 0; n <= n_steps; ++n) {
        const auto d_hf =
            physical_diagnostics(hf.magnetizations[n], setup.mesh, setup.grams);
        const auto d_rom = physical_diagnostics(rom.full_magnetizations[n],
                                                setup.mesh, setup.grams);
        const auto d_sg =
            physical_diagnostics(sg_fields[n], setup.mesh, setup.grams);
        const double err_rom =
            h1_norm(rom.full_magnetizations[n].coeffs -
                        hf.magnetizations[n].coeffs,
                    setup.grams);
        const double err_sg = h1_norm(
            sg_fields[n].coeffs - hf.magnetizations[n].coeffs, setup.grams);
        result.time_metrics.row(n) << n * setup.tps.tau, d_hf.unit_modulus_err,
            d_rom.unit_modulus_err, d_sg.unit_modulus_err, err_rom, err_sg,
            d_hf.dirichlet_energy, d_rom.dirichlet_energy,
            d_sg.dirichlet_energy, d_hf.avg_mz;
    }
    result.rom_unit_modulus_final =
        physical_diagnostics(rom.full_magnetizations.back(), setup.mesh,
                             setup.grams)
            .unit_modulus_err;
    result.sgrbp_unit_modulus_final =
        physical_diagnostics(sg_fields.back(), setup.mesh, setup.grams)
            .unit_modulus_err;
    return result;
}

DimensionRobustnessResult dimension_robustness_study(
    const ExperimentConfig& cfg, int n_indices) {
    DimensionRobustnessResult result;
    result.s_values = cfg.nd_s_list;
    const ProblemSetup setup = make_setup(cfg);

    for (int s : cfg.nd_s_list) {
        const std::vector<ParamVector> params = sample_parameters(
            s, cfg.n_snapshots,
            derive_seed(cfg.seed, ("snapshots_s" + std::to_string(s)).c_str()));
        const std::vector<Trajectory> trajs =
            run_many(setup, params, setup.tps);
        std::vector<Eigen::VectorXd> per_quantity;
        for (Quantity q : {Quantity::Magnetization, Quantity::Velocity,
                           Quantity::Multiplier}) {
            per_quantity.push_back(
                pod_compute(collect_snapshots(trajs, q), setup.grams)
                    .singular_values);
        }
        result.singular_values.push_back(std::move(per_quantity));
    }

    auto max_log_gap = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const int n = std::min({n_indices, static_cast<int>(a.size()),
                                static_cast<int>(b.size())});
        double gap = 0.0;
        for (int i = 0; i < n; ++i) {
            const double fa = std::max(a[i], 1e-14 * a[0]);
            const double fb = std::max(b[i], 1e-14 * b[0]);
            gap = std::max(gap, std::abs(std::log(fa) - std::log(fb)));
        }
        return gap;
    };
    if (result.singular_values.size() >= 3) {
        result.gap_v_s0_s1 = max_log_gap(result.singular_values[0][1],
                                         result.singular_values[1][1]);
        result.gap_v_s1_s2 = max_log_gap(result.singular_values[1][1],
                                         result.singular_values[2][1]);
    }
    return result;
}

namespace {

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg,
                    const std::vector<fs::path>& inputs) {
    KeyValueConfig manifest = cfg.to_config();
    for (const auto& input : inputs) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a_file(input)));
        manifest.set("input_hash." + input.filename().string(), buf);
    }
    atomic_write_text(dir / "manifest.cfg", manifest.serialize());
}

KeyValueConfig trajectory_meta(const ExperimentConfig& cfg, int sample_index) {
    KeyValueConfig meta;
    meta.set("mesh.n_div", std::to_string(cfg.n_div));
    meta.set("time.T", format_double(cfg.T));
    meta.set("time.tau", format_double(cfg.tau));
    meta.set("model.alpha", format_double(cfg.alpha));
    meta.set("param.s", std::to_string(cfg.s));
    meta.set("sampling.seed", std::to_string(cfg.seed));
    meta.set("sample_index", std::to_string(sample_index));
    return meta;
}

std::string sample_dir_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "traj_%04d", index);
    return buf;
}

}  // namespace

void run_hf_solve(const ExperimentConfig& cfg, const fs::path& out_dir) {
    const ProblemSetup setup = make_setup(cfg);
    const std::vector<ParamVector> params = sample_parameters(
        cfg.s, cfg.n_snapshots, derive_seed(cfg.seed, "snapshots"));
    fs::create_directories(out_dir);
    write_params(out_dir / "params.csv", params);
    for (size_t m = 0; m < params.size(); ++m) {
        const Trajectory traj = tps_run(setup.mesh, setup.grams, setup.noise,
                                        setup.m0, params[m], setup.tps);
        write_trajectory(out_dir / sample_dir_name(static_cast<int>(m)), traj,
                         trajectory_meta(cfg, static_cast<int>(m)));
    }
    write_manifest(out_dir, cfg, {});
}

void run_offline_pod(const ExperimentConfig& cfg, const fs::path& snapshot_dir,
                     const fs::path& out_dir) {
    const ProblemSetup setup = make_setup(cfg);
    std::vector<Trajectory> trajs;
    for (int m = 0;; ++m) {
        const fs::path dir = snapshot_dir / sample_dir_name(m);
        if (!fs::exists(dir)) {
            break;
        }
        trajs.push_back(read_trajectory(dir));
    }
    if (trajs.empty()) {
        throw IoError("run_offline_pod: no trajectories under " +
                      snapshot_dir.string() + " (expected traj_0000/...)");
    }
    fs::create_directories(out_dir);
    const struct {
        Quantity q;
        const char* name;
        double eps;
    } quantities[] = {
        {Quantity::Magnetization, "m", cfg.eps_sq_m},
        {Quantity::Velocity, "v", cfg.eps_sq_v},
        {Quantity::Multiplier, "lambda", cfg.eps_sq_lambda},
    };
    for (const auto& info : quantities) {
        const ReducedBasis full =
            pod_compute(collect_snapshots(trajs, info.q), setup.grams);
        const ReducedBasis cut = truncate(full, info.eps);
        KeyValueConfig meta;
        meta.set("quantity", info.name);
        meta.set("mesh.n_div", std::to_string(cfg.n_div));
        meta.set("eps_sq", format_double(info.eps));
        meta.set("full_rank", std::to_string(full.dimension()));
        write_basis(out_dir / (std::string("basis_") + info.name), cut, meta);
    }
    write_manifest(out_dir, cfg, {snapshot_dir / "params.csv"});
}

void run_online_rom(const ExperimentConfig& cfg, const fs::path& basis_dir,
                    const fs::path& out_dir) {
    const ProblemSetup setup = make_setup(cfg);
    const ReducedBasis basis_v = read_basis(basis_dir / "basis_v");
    const ReducedBasis basis_lambda = read_basis(basis_dir / "basis_lambda");
    const ReducedBasis basis_m = read_basis(basis_dir / "basis_m");

    const TpsConfig online{cfg.alpha, cfg.T,
                           cfg.tau_online > 0.0 ? cfg.tau_online : cfg.tau,
                           true};
    const RomVariant variant = parse_variant(cfg.variant);
    const int budget =
        (variant == RomVariant::OG3x || variant == RomVariant::SSOG3x)
            ? std::min(basis_v.dimension(), 3 * basis_lambda.dimension())
            : std::min(basis_v.dimension(), basis_lambda.dimension());
    const RomSpaces spaces =
        build_rom_spaces(setup.mesh, setup.grams, basis_v, basis_lambda,
                         basis_m, variant, budget);

    const std::vector<ParamVector> test_params =
        sample_parameters(cfg.s, cfg.n_test, derive_seed(cfg.seed, "test"));
    fs::create_directories(out_dir);
    write_params(out_dir / "params.csv", test_params);
    for (size_t m = 0; m < test_params.size(); ++m) {
        const RomTrajectory rom =
            rom_run(setup.mesh, setup.grams, setup.noise, spaces, setup.m0,
                    test_params[m], online);
        const fs::path dir = out_dir / sample_dir_name(static_cast<int>(m));
        fs::create_directories(dir);
        Eigen::MatrixXd mags(static_cast<Eigen::Index>(
                                 rom.full_magnetizations.size()),
                             rom.full_magnetizations.front().coeffs.size());
        for (size_t r = 0; r < rom.full_magnetizations.size(); ++r) {
            mags.row(static_cast<Eigen::Index>(r)) =
                rom.full_magnetizations[r].coeffs.transpose();
        }
        std::vector<std::string> header(mags.cols());
        for (Eigen::Index c = 0; c < mags.cols(); ++c) {
            header[c] = "c" + std::to_string(c);
        }
        write_csv(dir / "magnetizations.csv", header, mags);
        Eigen::MatrixXd coeffs(
            static_cast<Eigen::Index>(rom.reduced_coeffs.size()),
            rom.reduced_coeffs.front().size());
        for (size_t r = 0; r < rom.reduced_coeffs.size(); ++r) {
            coeffs.row(static_cast<Eigen::Index>(r)) =
                rom.reduced_coeffs[r].transpose();
        }
        std::vector<std::string> rheader(coeffs.cols());
        for (Eigen::Index c = 0; c < coeffs.cols(); ++c) {
            rheader[c] = "a" + std::to_string(c);
        }
        write_csv(dir / "reduced_coeffs.csv", rheader, coeffs);
        Eigen::MatrixXd beta(static_cast<Eigen::Index>(rom.infsup.size()), 1);
        for (size_t r = 0; r < rom.infsup.size(); ++r) {
            beta(static_cast<Eigen::Index>(r), 0) = rom.infsup[r];
        }
        write_csv(dir / "infsup.csv", {"beta"}, beta);
        KeyValueConfig meta = trajectory_meta(cfg, static_cast<int>(m));
        meta.set("online.variant", cfg.variant);
        meta.set("online.velocity_dim", std::to_string(spaces.velocity_dim()));
        meta.set("online.lambda_dim", std::to_string(spaces.lambda_dim()));
        atomic_write_text(dir / "meta.cfg", meta.serialize());
    }
    write_manifest(out_dir, cfg,
                   {basis_dir / "basis_v" / "basis.csv",
                    basis_dir / "basis_lambda" / "basis.csv",
                    basis_dir / "basis_m" / "basis.csv"});
}

void run_sgrbp_stage(const ExperimentConfig& cfg, const fs::path& out_dir) {
    ExperimentConfig local = cfg;
    local.T = cfg.sg_final_time;
    const ProblemSetup setup = make_setup(local);
    const std::vector<ParamVector> train = sample_parameters(
        cfg.s, cfg.n_snapshots, derive_seed(cfg.seed, "snapshots"));
    const std::vector<Trajectory> trajs = run_many(setup, train, setup.tps);
    const ReducedBasis basis_m = truncate(
        pod_compute(collect_snapshots(trajs, Quantity::Magnetization),
                    setup.grams),
        cfg.eps_sq_m);

    const MultiIndexSet lambda =
        build_index_set(cfg.s, cfg.sg_threshold, cfg.sg_degree);
    const SparseGridOp op(lambda, cfg.sg_degree);
    const SgRbpSurrogate surrogate = sgrbp_build(
        setup.mesh, setup.grams, setup.noise, setup.m0, setup.tps, basis_m, op);

    fs::create_directories(out_dir);
    // grid serialization: multi-index set and node list
    Eigen::MatrixXd idx(static_cast<Eigen::Index>(lambda.indices.size()),
                        lambda.s);
    for (size_t r = 0; r < lambda.indices.size(); ++r) {
        for (int c = 0; c < lambda.s; ++c) {
            idx(static_cast<Eigen::Index>(r), c) = lambda.indices[r][c];
        }
    }
    std::vector<std::string> iheader(lambda.s);
    for (int c = 0; c < lambda.s; ++c) {
        iheader[c] = "nu" + std::to_string(c + 1);
    }
    write_csv(out_dir / "multi_index_set.csv", iheader, idx);

    Eigen::MatrixXd nodes(static_cast<Eigen::Index>(op.num_nodes()),
                          lambda.s);
    for (int r = 0; r < op.num_nodes(); ++r) {
        nodes.row(r) = op.nodes()[r].transpose();
    }
    std::vector<std::string> nheader(lambda.s);
    for (int c = 0; c < lambda.s; ++c) {
        nheader[c] = "y" + std::to_string(c + 1);
    }
    write_csv(out_dir / "grid_nodes.csv", nheader, nodes);

    KeyValueConfig bmeta;
    bmeta.set("quantity", "m");
    bmeta.set("mesh.n_div", std::to_string(cfg.n_div));
    write_basis(out_dir / "basis_m", basis_m, bmeta);

    for (int node = 0; node < op.num_nodes(); ++node) {
        const int k = basis_m.dimension();
        const int n_steps = setup.tps.num_steps();
        Eigen::MatrixXd coeffs(n_steps + 1, k);
        for (int n = 0; n <= n_steps; ++n) {
            coeffs.row(n) = surrogate.node_coeffs[node]
                                .segment(static_cast<Eigen::Index>(n) * k, k)
                                .transpose();
        }
        std::vector<std::string> cheader(k);
        for (int c = 0; c < k; ++c) {
            cheader[c] = "a" + std::to_string(c);
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "node_%04d.csv", node);
        write_csv(out_dir / buf, cheader, coeffs);
    }
    write_manifest(out_dir, cfg, {});
}

void run_metrics_stage(const fs::path& traj_dir, const fs::path& out_file) {
    KeyValueConfig meta;
    const Trajectory traj = read_trajectory(traj_dir, &meta);
    const int n_div = meta.get_int("mesh.n_div", 0);
    if (n_div < 1) {
        throw IoError("run_metrics_stage: meta.cfg lacks mesh.n_div");
    }
    const double tau = meta.get_double("time.tau", 0.0);
    const TriMesh mesh = build_structured_mesh(n_div);
    const GramSet grams = assemble_gram(mesh);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(traj.magnetizations.size()),
                         4);
    for (size_t n = 0; n < traj.magnetizations.size(); ++n) {
        const auto diag =
            physical_diagnostics(traj.magnetizations[n], mesh, grams);
        rows.row(static_cast<Eigen::Index>(n))
            << static_cast<double>(n) * tau,
            diag.unit_modulus_err, diag.dirichlet_energy, diag.avg_mz;
    }
    write_csv(out_file, {"t", "unit_modulus_err", "dirichlet_energy", "avg_mz"},
              rows);
}

namespace {

void write_variant_rows(const fs::path& path,
                        const std::vector<VariantStudyRow>& rows) {
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), 4);
    for (size_t r = 0; r < rows.size(); ++r) {
        data.row(static_cast<Eigen::Index>(r))
            << rows[r].dim, static_cast<double>(rows[r].variant),
            rows[r].gpod_error, rows[r].min_infsup;
    }
    write_csv(path, {"dim", "variant_id", "gpod_error", "min_infsup"}, data);
}

void write_singular_values(const fs::path& path, const Eigen::VectorXd& sv) {
    Eigen::MatrixXd data(sv.size(), 2);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        data(i, 0) = static_cast<double>(i + 1);
        data(i, 1) = sv[i];
    }
    write_csv(path, {"index", "sigma"}, data);
}

}  // namespace

void run_experiment(const std::string& name, const ExperimentConfig& cfg,
                    const fs::path& out_dir) {
    fs::create_directories(out_dir);
    if (name == "relax-1d") {
        const ProblemSetup setup = make_setup(cfg);
        const OfflineBundle bundle = run_offline(setup, cfg);

        write_singular_values(out_dir / "singular_values_m.csv",
                              bundle.basis_m.singular_values);
        write_singular_values(out_dir / "singular_values_v.csv",
                              bundle.basis_v.singular_values);
        write_singular_values(out_dir / "singular_values_lambda.csv",
                              bundle.basis_lambda.singular_values);

        const struct {
            const ReducedBasis* basis;
            Quantity q;
            const char* name;
        } quantities[] = {
            {&bundle.basis_m, Quantity::Magnetization, "m"},
            {&bundle.basis_v, Quantity::Velocity, "v"},
            {&bundle.basis_lambda, Quantity::Multiplier, "lambda"},
        };
        for (const auto& info : quantities) {
            std::vector<double> dims, errs;
            for (int dim : cfg.online_dims) {
                if (dim > info.basis->dimension()) {
                    continue;
                }
                dims.push_back(dim);
                errs.push_back(projection_error(
                    truncate_to_dim(*info.basis, dim), setup.grams,
                    bundle.test, info.q));
            }
            Eigen::MatrixXd data(static_cast<Eigen::Index>(dims.size()), 2);
            for (size_t i = 0; i < dims.size(); ++i) {
                data.row(static_cast<Eigen::Index>(i)) << dims[i], errs[i];
            }
            write_csv(out_dir /
                          (std::string("projection_error_") + info.name +
                           ".csv"),
                      {"dim", "error"}, data);
        }

        write_variant_rows(out_dir / "variant_comparison.csv",
                           variant_study(setup, bundle, cfg));

        const TauStudyResult tau_result = tau_study(setup, bundle, cfg);
        Eigen::MatrixXd tau_data(
            static_cast<Eigen::Index>(tau_result.taus.size()), 3);
        for (size_t i = 0; i < tau_result.taus.size(); ++i) {
            tau_data.row(static_cast<Eigen::Index>(i))
                << tau_result.taus[i], tau_result.errors[i],
                tau_result.min_infsup[i];
        }
        write_csv(out_dir / "tau_refinement.csv",
                  {"tau", "gpod_error", "min_infsup"}, tau_data);

        const std::vector<HStudyRow> h_rows = h_study(cfg);
        Eigen::MatrixXd h_data(static_cast<Eigen::Index>(h_rows.size()), 6);
        for (size_t i = 0; i < h_rows.size(); ++i) {
            h_data.row(static_cast<Eigen::Index>(i))
                << h_rows[i].n_div, h_rows[i].h, h_rows[i].hf_error,
                h_rows[i].hf_min_infsup, h_rows[i].gpod_og3x,
                h_rows[i].gpod_ssog3x;
        }
        write_csv(out_dir / "h_refinement.csv",
                  {"n_div", "h", "hf_h1_error", "hf_min_infsup", "gpod_og3x",
                   "gpod_ssog3x"},
                  h_data);
    } else if (name == "relax-nd") {
        const DimensionRobustnessResult result =
            dimension_robustness_study(cfg);
        const char* qnames[3] = {"m", "v", "lambda"};
        for (size_t i = 0; i < result.s_values.size(); ++i) {
            for (int q = 0; q < 3; ++q) {
                write_singular_values(
                    out_dir / ("singular_values_s" +
                               std::to_string(result.s_values[i]) + "_" +
                               qnames[q] + ".csv"),
                    result.singular_values[i][q]);
            }
        }
        Eigen::MatrixXd gaps(2, 1);
        gaps << result.gap_v_s0_s1, result.gap_v_s1_s2;
        write_csv(out_dir / "sv_gaps_v.csv", {"max_log_gap"}, gaps);
    } else if (name == "sg-conv") {
        const std::vector<SgConvRow> rows = sg_convergence_study(cfg);
        Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), 7);
        for (size_t i = 0; i < rows.size(); ++i) {
            data.row(static_cast<Eigen::Index>(i))
                << rows[i].threshold, rows[i].n_nodes, rows[i].active_dims,
                rows[i].rb_eps_sq, rows[i].rb_dim, rows[i].error,
                rows[i].proj_floor;
        }
        write_csv(out_dir / "sg_convergence.csv",
                  {"threshold", "n_nodes", "active_dims", "rb_eps_sq",
                   "rb_dim", "error", "proj_floor"},
                  data);
    } else if (name == "switching") {
        const SwitchingResult result = switching_study(cfg);
        Eigen::MatrixXd mz(
            static_cast<Eigen::Index>(result.final_avg_mz.size()), 2);
        for (size_t i = 0; i < result.final_avg_mz.size(); ++i) {
            mz.row(static_cast<Eigen::Index>(i))
                << static_cast<double>(i), result.final_avg_mz[i];
        }
        write_csv(out_dir / "final_avg_mz.csv", {"sample", "avg_mz"}, mz);

        Eigen::MatrixXd hist(
            static_cast<Eigen::Index>(result.histogram_counts.size()), 3);
        for (size_t i = 0; i < result.histogram_counts.size(); ++i) {
            hist.row(static_cast<Eigen::Index>(i))
                << -1.0 + 0.1 * static_cast<double>(i),
                -1.0 + 0.1 * static_cast<double>(i + 1),
                result.histogram_counts[i];
        }
        write_csv(out_dir / "final_avg_mz_histogram.csv",
                  {"bin_lo", "bin_hi", "count"}, hist);

        write_csv(out_dir / "time_metrics.csv",
                  {"t", "ume_hf", "ume_rom", "ume_sgrbp", "h1err_rom",
                   "h1err_sgrbp", "energy_hf", "energy_rom", "energy_sgrbp",
                   "avg_mz_hf"},
                  result.time_metrics);
    } else {
        throw ConfigError("unknown experiment: " + name);
    }
    write_manifest(out_dir, cfg, {});
}

}  // namespace llgrom
