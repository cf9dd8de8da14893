#include <doctest.h>

#include <cmath>

#include "llgrom/experiments.hpp"
#include "llgrom/metrics.hpp"
#include "llgrom/sgrbp.hpp"

using namespace llgrom;

namespace {

struct TinyProblem {
    ProblemSetup setup;
    ReducedBasis basis_m;
};

TinyProblem make_tiny(int s) {
    ExperimentConfig cfg;
    cfg.n_div = 2;
    cfg.T = 0.02;
    cfg.tau = 2e-3;
    cfg.s = s;
    cfg.n_snapshots = 4;
    cfg.n_test = 2;
    TinyProblem out{make_setup(cfg), {}};
    const auto params = sample_parameters(s, cfg.n_snapshots, 91);
    std::vector<Trajectory> trajs;
    for (const auto& y : params) {
        trajs.push_back(tps_run(out.setup.mesh, out.setup.grams,
                                out.setup.noise, out.setup.m0, y,
                                out.setup.tps));
    }
    out.basis_m = pod_compute(
        collect_snapshots(trajs, Quantity::Magnetization), out.setup.grams);
    return out;
}

}  // namespace

TEST_CASE("surrogate with the root-only grid is constant in y") {
    TinyProblem tiny = make_tiny(2);
    MultiIndexSet root;
    root.s = 2;
    root.indices = {{0, 0}};
    const SparseGridOp op(root, 1);
    CHECK(op.num_nodes() == 1);

    const SgRbpSurrogate surrogate =
        sgrbp_build(tiny.setup.mesh, tiny.setup.grams, tiny.setup.noise,
                    tiny.setup.m0, tiny.setup.tps, tiny.basis_m, op);
    Eigen::VectorXd y1(2), y2(2);
    y1 << 1.3, -0.2;
    y2 << -2.0, 0.9;
    const auto a = sgrbp_eval(surrogate, ParamVector(y1));
    const auto b = sgrbp_eval(surrogate, ParamVector(y2));
    REQUIRE(a.size() == b.size());
    for (size_t n = 0; n < a.size(); ++n) {
        CHECK((a[n].coeffs - b[n].coeffs).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("node queries reproduce the stored projections") {
    TinyProblem tiny = make_tiny(2);
    const MultiIndexSet set = build_index_set(2, 0.05, 1);
    const SparseGridOp op(set, 1);
    CHECK(op.num_nodes() == static_cast<int>(op.nodes().size()));

    const SgRbpSurrogate surrogate =
        sgrbp_build(tiny.setup.mesh, tiny.setup.grams, tiny.setup.noise,
                    tiny.setup.m0, tiny.setup.tps, tiny.basis_m, op);

    const int k = tiny.basis_m.dimension();
    for (int node = 0; node < op.num_nodes(); ++node) {
        const auto fields = sgrbp_eval(surrogate, ParamVector(op.nodes()[node]));
        for (int n = 0; n < static_cast<int>(fields.size()); ++n) {
            const Eigen::VectorXd expected =
                tiny.basis_m.phi *
                surrogate.node_coeffs[node].segment(
                    static_cast<Eigen::Index>(n) * k, k);
            CHECK((fields[n].coeffs - expected).cwiseAbs().maxCoeff() <
                  1e-11);
        }
    }
}

TEST_CASE("y-independent dynamics are reproduced exactly") {
    // g = e_z and m0 = e_z make the rotation a no-op on the state, and a
    // constant external field keeps the dynamics stationary
    ExperimentConfig cfg;
    cfg.n_div = 2;
    cfg.T = 0.02;
    cfg.tau = 2e-3;
    cfg.s = 2;
    ProblemSetup setup = make_setup(cfg);
    FeVectorField ez = FeVectorField::zero(setup.mesh.num_nodes());
    for (int k = 0; k < setup.mesh.num_nodes(); ++k) {
        ez.set_node(k, {0, 0, 1});
    }
    setup.noise = make_noise_model(ez, hext_preset_function("minus_ez"));
    setup.m0 = [](const Eigen::Vector2d&) {
        return Eigen::Vector3d(0, 0, 1);
    };

    const Trajectory reference =
        tps_run(setup.mesh, setup.grams, setup.noise, setup.m0,
                ParamVector::zero(2), setup.tps);
    std::vector<Trajectory> trajs = {reference};
    const ReducedBasis basis = pod_compute(
        collect_snapshots(trajs, Quantity::Magnetization), setup.grams);

    const MultiIndexSet set = build_index_set(2, 0.05, 1);
    const SparseGridOp op(set, 1);
    const SgRbpSurrogate surrogate =
        sgrbp_build(setup.mesh, setup.grams, setup.noise, setup.m0, setup.tps,
                    basis, op);

    Eigen::VectorXd y(2);
    y << 0.7, -1.9;
    const auto fields = sgrbp_eval(surrogate, ParamVector(y));
    for (size_t n = 0; n < fields.size(); ++n) {
        const auto [c, rec] =
            project(basis, setup.grams, reference.magnetizations[n].coeffs);
        CHECK((fields[n].coeffs - rec).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("evaluation is linear in the stored node data") {
    TinyProblem tiny = make_tiny(2);
    const MultiIndexSet set = build_index_set(2, 0.2, 1);
    const SparseGridOp op(set, 1);
    const SgRbpSurrogate surrogate =
        sgrbp_build(tiny.setup.mesh, tiny.setup.grams, tiny.setup.noise,
                    tiny.setup.m0, tiny.setup.tps, tiny.basis_m, op);

    SgRbpSurrogate scaled = surrogate;
    for (auto& c : scaled.node_coeffs) {
        c *= 2.5;
    }
    Eigen::VectorXd y(2);
    y << 0.4, 1.1;
    const auto base = sgrbp_eval(surrogate, ParamVector(y));
    const auto twice = sgrbp_eval(scaled, ParamVector(y));
    for (size_t n = 0; n < base.size(); ++n) {
        CHECK((twice[n].coeffs - 2.5 * base[n].coeffs).cwiseAbs().maxCoeff() <
              1e-11);
    }
}

TEST_CASE("surrogate output is not unit-modulus away from the nodes") {
    TinyProblem tiny = make_tiny(1);
    const MultiIndexSet set = build_index_set(1, 0.3, 1);
    const SparseGridOp op(set, 1);
    REQUIRE(op.num_nodes() >= 2);
    const SgRbpSurrogate surrogate =
        sgrbp_build(tiny.setup.mesh, tiny.setup.grams, tiny.setup.noise,
                    tiny.setup.m0, tiny.setup.tps, tiny.basis_m, op);

    Eigen::VectorXd y(1);
    y << 0.9;  // strictly between grid nodes
    const auto fields = sgrbp_eval(surrogate, ParamVector(y));
    const auto diag = physical_diagnostics(fields.back(), tiny.setup.mesh,
                                           tiny.setup.grams);
    CHECK(diag.unit_modulus_err > 0.0);
}
