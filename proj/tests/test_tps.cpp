#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "llgrom/experiments.hpp"
#include "llgrom/tps.hpp"
#include "test_helpers.hpp"

using namespace llgrom;

namespace {

NoiseModel relax_noise(const TriMesh& mesh) {
    return make_noise_model(
        nodal_interpolate(mesh, g_preset_function("relaxation")));
}

PointFunction uniform_ez() {
    return [](const Eigen::Vector2d&) { return Eigen::Vector3d(0, 0, 1); };
}

}  // namespace

TEST_CASE("tps config validation") {
    TpsConfig cfg{1.4, 0.5, 1e-3, true};
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.num_steps() == 500);
    CHECK_THROWS(TpsConfig{1.4, 0.5, 3e-4, true}.validate());
    CHECK_THROWS(TpsConfig{-1.0, 0.5, 1e-3, true}.validate());
    CHECK_THROWS(TpsConfig{1.4, 1e-4, 1e-3, true}.validate());
}

TEST_CASE("tps step") {
    const TriMesh mesh = build_structured_mesh(2);
    const GramSet grams = assemble_gram(mesh);
    const NoiseModel noise = relax_noise(mesh);
    const TpsConfig cfg{1.4, 0.1, 1e-2, true};
    std::mt19937 rng(29);

    SUBCASE("uniform state with no forcing is stationary") {
        FeVectorField m = FeVectorField::zero(mesh.num_nodes());
        for (int k = 0; k < mesh.num_nodes(); ++k) {
            m.set_node(k, {0, 0, 1});
        }
        const auto [v, lambda] = tps_step(mesh, grams, noise, m, 0.0, 0.0, cfg);
        CHECK(v.coeffs.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(lambda.coeffs.cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("velocity satisfies the discrete tangency constraint") {
        const FeVectorField m = testing::random_unit_field(mesh, rng);
        const double w_val = 0.6;
        const auto [v, lambda] =
            tps_step(mesh, grams, noise, m, w_val, 0.05, cfg);
        const SpMat b = assemble_constraint(mesh, m);
        CHECK((b * v.coeffs).cwiseAbs().maxCoeff() <
              1e-8 * std::max(1.0, v.coeffs.norm()));
    }

    SUBCASE("matches a dense full-pivot solve of the block system") {
        const FeVectorField m = testing::random_unit_field(mesh, rng);
        const double w_val = -0.9;
        const auto [v, lambda] =
            tps_step(mesh, grams, noise, m, w_val, 0.03, cfg);

        const int n = mesh.num_nodes();
        const SpMat a = assemble_system_matrix(mesh, grams, m, cfg.alpha, cfg.tau);
        const SpMat b = assemble_constraint(mesh, m);
        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(4 * n, 4 * n);
        sys.topLeftCorner(3 * n, 3 * n) = Eigen::MatrixXd(a);
        sys.topRightCorner(3 * n, n) = Eigen::MatrixXd(b).transpose();
        sys.bottomLeftCorner(n, 3 * n) = Eigen::MatrixXd(b);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * n);
        rhs.head(3 * n) = assemble_load(mesh, grams, noise, m, w_val, 0.03);
        const Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(sys).solve(rhs);
        CHECK((v.coeffs - sol.head(3 * n)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((lambda.coeffs - sol.tail(n)).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("vanishing magnetization rejected") {
        FeVectorField m = testing::random_unit_field(mesh, rng);
        m.set_node(3, {0, 0, 0});
        CHECK_THROWS(tps_step(mesh, grams, noise, m, 0.0, 0.0, cfg));
    }
}

TEST_CASE("tps run on the stationary state") {
    const TriMesh mesh = build_structured_mesh(4);
    const GramSet grams = assemble_gram(mesh);
    const NoiseModel noise = relax_noise(mesh);
    const TpsConfig cfg{1.4, 0.05, 1e-2, true};

    const Trajectory traj = tps_run(mesh, grams, noise, uniform_ez(),
                                    ParamVector::zero(1), cfg);
    CHECK(traj.magnetizations.size() == 6);
    const Eigen::VectorXd& m0 = traj.magnetizations.front().coeffs;
    for (const auto& m : traj.magnetizations) {
        const Eigen::VectorXd diff = m.coeffs - m0;
        CHECK(std::sqrt(diff.dot(grams.q_vec * diff)) < 1e-10);
    }
}

TEST_CASE("tps run: unit modulus, energy decay, determinism") {
    const TriMesh mesh = build_structured_mesh(4);
    const GramSet grams = assemble_gram(mesh);
    const NoiseModel noise = relax_noise(mesh);
    const TpsConfig cfg{1.4, 0.05, 2.5e-3, true};
    const PointFunction m0 = m0_preset_function("relaxation");

    const Trajectory traj =
        tps_run(mesh, grams, noise, m0, ParamVector::zero(1), cfg);

    SUBCASE("unit nodal modulus at every step") {
        for (const auto& m : traj.magnetizations) {
            CHECK((nodal_moduli(m).array() - 1.0).abs().maxCoeff() < 1e-10);
        }
    }

    SUBCASE("dirichlet energy decays without forcing") {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& m : traj.magnetizations) {
            const double energy = m.coeffs.dot(grams.stiff_vec * m.coeffs);
            CHECK(energy <= prev + 1e-8);
            prev = energy;
        }
    }

    SUBCASE("bitwise deterministic") {
        const Trajectory again =
            tps_run(mesh, grams, noise, m0, ParamVector::zero(1), cfg);
        for (size_t n = 0; n < traj.magnetizations.size(); ++n) {
            CHECK(traj.magnetizations[n].coeffs ==
                  again.magnetizations[n].coeffs);
        }
    }

    SUBCASE("projection-free variant drifts off the unit sphere") {
        TpsConfig pf = cfg;
        pf.normalize = false;
        const Eigen::VectorXd y1 = Eigen::VectorXd::Ones(1);
        const Trajectory free =
            tps_run(mesh, grams, noise, m0, ParamVector(y1), pf);
        const double drift =
            (nodal_moduli(free.magnetizations.back()).array() - 1.0)
                .abs()
                .maxCoeff();
        CHECK(drift > 1e-10);  // no normalization applied
        CHECK(drift < 0.5);    // but still a sane approximation
    }
}

TEST_CASE("inf-sup constant of the constraint") {
    const TriMesh mesh = build_structured_mesh(2);
    const GramSet grams = assemble_gram(mesh);
    std::mt19937 rng(31);

    SUBCASE("zero magnetization gives zero") {
        CHECK(infsup_constant(mesh, grams,
                              FeVectorField::zero(mesh.num_nodes())) == 0.0);
    }

    SUBCASE("dense path matches a generalized eigenvalue oracle") {
        const FeVectorField m = testing::random_unit_field(mesh, rng);
        const double beta = infsup_constant(mesh, grams, m);

        const SpMat b = assemble_constraint(mesh, m);
        const Eigen::MatrixXd bd(b);
        const Eigen::MatrixXd q(grams.q_vec);
        const Eigen::MatrixXd mass(grams.mass_scalar);
        const Eigen::MatrixXd schur = bd * q.inverse() * bd.transpose();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur,
                                                                     mass);
        const double oracle = std::sqrt(std::max(0.0, es.eigenvalues()[0]));
        CHECK(beta == doctest::Approx(oracle).epsilon(1e-8));
    }

    SUBCASE("iterative path agrees with the dense path") {
        const FeVectorField m = testing::random_unit_field(mesh, rng);
        const double dense = infsup_constant(mesh, grams, m);
        const double iterative = infsup_constant(mesh, grams, m, 0);
        CHECK(iterative == doctest::Approx(dense).epsilon(1e-7));
    }
}
