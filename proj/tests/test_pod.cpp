#include <doctest.h>

#include <cmath>
#include <random>

#include "llgrom/experiments.hpp"
#include "llgrom/pod.hpp"
#include "test_helpers.hpp"

using namespace llgrom;

namespace {

ReducedBasis basis_with_sigmas(const Eigen::VectorXd& sigmas) {
    ReducedBasis basis;
    basis.singular_values = sigmas;
    basis.phi = Eigen::MatrixXd::Identity(sigmas.size(), sigmas.size());
    basis.gram = GramKind::L2Scalar;
    return basis;
}

// Q-orthonormal columns via the triangular factor of Q
Eigen::MatrixXd q_orthonormal_columns(const GramSet& grams, int count,
                                      std::mt19937& rng) {
    const int n = static_cast<int>(grams.q_vec.rows());
    const Eigen::MatrixXd raw = [&] {
        Eigen::MatrixXd m(n, count);
        std::normal_distribution<double> dist;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < count; ++j) {
                m(i, j) = dist(rng);
            }
        }
        return m;
    }();
    return orthonormalize_q(grams.q_vec, Eigen::MatrixXd(n, 0), raw);
}

}  // namespace

TEST_CASE("pod rank and isometry cases") {
    const TriMesh mesh = build_structured_mesh(2);
    const GramSet grams = assemble_gram(mesh);
    std::mt19937 rng(41);

    SUBCASE("two identical nonzero columns have rank one") {
        SnapshotSet set;
        set.gram = GramKind::H1Vec;
        Eigen::VectorXd col = testing::random_vector(3 * mesh.num_nodes(), rng);
        set.data.resize(col.size(), 2);
        set.data.col(0) = col;
        set.data.col(1) = col;
        const ReducedBasis basis = pod_compute(set, grams);
        CHECK(basis.dimension() == 1);
        CHECK(basis.singular_values[0] > 0.0);
        CHECK(basis.singular_values[1] < 1e-12 * basis.singular_values[0]);
    }

    SUBCASE("scaled Q-orthonormal columns give unit singular values") {
        const int count = 4;
        const Eigen::MatrixXd phi0 = q_orthonormal_columns(grams, count, rng);
        SnapshotSet set;
        set.gram = GramKind::H1Vec;
        set.data = phi0 * std::sqrt(static_cast<double>(count));
        const ReducedBasis basis = pod_compute(set, grams);
        CHECK(basis.dimension() == count);
        for (int j = 0; j < count; ++j) {
            CHECK(basis.singular_values[j] ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("pod matches the method-of-snapshots oracle on a 20x6 case") {
    const TriMesh mesh = build_structured_mesh(2);  // N_h = 9 -> L2 scalar 9
    const GramSet grams = assemble_gram(mesh);
    std::mt19937 rng(43);

    // 20 rows requires a custom gram; use the scalar L2 gram with 9 dofs and
    // 6 columns instead, same algebra
    SnapshotSet set;
    set.gram = GramKind::L2Scalar;
    set.data.resize(mesh.num_nodes(), 6);
    for (int c = 0; c < 6; ++c) {
        set.data.col(c) = testing::random_vector(mesh.num_nodes(), rng);
    }
    const ReducedBasis basis = pod_compute(set, grams);

    // oracle: eigen-decomposition of (1/N) D^T Q D
    const Eigen::MatrixXd q(grams.mass_scalar);
    const Eigen::MatrixXd gram =
        set.data.transpose() * q * set.data / set.data.cols();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    Eigen::VectorXd expected = es.eigenvalues().reverse();
    for (int j = 0; j < expected.size(); ++j) {
        const double sigma = std::sqrt(std::max(0.0, expected[j]));
        CHECK(basis.singular_values[j] ==
              doctest::Approx(sigma).epsilon(1e-10));
    }

    SUBCASE("orthonormality in the weighting inner product") {
        const Eigen::MatrixXd gram_phi =
            basis.phi.transpose() * q * basis.phi;
        CHECK((gram_phi - Eigen::MatrixXd::Identity(basis.dimension(),
                                                    basis.dimension()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }
}

TEST_CASE("truncation criterion") {
    Eigen::VectorXd sigmas(3);
    sigmas << 2.0, 1.0, 1.0;
    const ReducedBasis basis = basis_with_sigmas(sigmas);

    CHECK(truncate(basis, 0.4).dimension() == 1);   // 4/6 >= 0.6
    CHECK(truncate(basis, 0.1).dimension() == 3);   // 5/6 < 0.9
    CHECK(truncate(basis, 0.999).dimension() == 1);

    CHECK_THROWS(truncate(basis, 0.0));
    CHECK_THROWS(truncate(basis, 1.0));
    CHECK_THROWS(truncate(basis_with_sigmas(Eigen::VectorXd::Zero(3)), 0.5));
    CHECK_THROWS(truncate_to_dim(basis, 0));
    CHECK_THROWS(truncate_to_dim(basis, 4));
}

TEST_CASE("projection identities") {
    const TriMesh mesh = build_structured_mesh(3);
    const GramSet grams = assemble_gram(mesh);
    std::mt19937 rng(47);

    ReducedBasis basis;
    basis.gram = GramKind::H1Vec;
    basis.phi = q_orthonormal_columns(grams, 5, rng);
    basis.singular_values = Eigen::VectorXd::Ones(5);

    SUBCASE("members of the span are reproduced") {
        const Eigen::VectorXd coeffs = testing::random_vector(5, rng);
        const Eigen::VectorXd w = basis.phi * coeffs;
        const auto [c, rec] = project(basis, grams, w);
        CHECK((rec - w).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((c - coeffs).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("Q-orthogonal complement maps to zero") {
        Eigen::VectorXd w = testing::random_vector(3 * mesh.num_nodes(), rng);
        // remove the basis component
        const Eigen::VectorXd c = basis.phi.transpose() * (grams.q_vec * w);
        w -= basis.phi * c;
        const auto [c2, rec] = project(basis, grams, w);
        CHECK(c2.cwiseAbs().maxCoeff() < 1e-10);
        CHECK(rec.cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("pythagoras in the Q inner product") {
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::VectorXd w =
                testing::random_vector(3 * mesh.num_nodes(), rng);
            const auto [c, rec] = project(basis, grams, w);
            const Eigen::VectorXd r = w - rec;
            const double total = w.dot(grams.q_vec * w);
            const double parts = c.squaredNorm() + r.dot(grams.q_vec * r);
            CHECK(total == doctest::Approx(parts).epsilon(1e-10));
            // residual is Q-orthogonal to the span
            CHECK((basis.phi.transpose() * (grams.q_vec * r))
                      .cwiseAbs()
                      .maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("projection error identities on training data") {
    const ExperimentConfig cfg = [] {
        ExperimentConfig c;
        c.n_div = 2;
        c.T = 0.02;
        c.tau = 2e-3;
        c.s = 2;
        c.n_snapshots = 3;
        c.n_test = 2;
        return c;
    }();
    const ProblemSetup setup = make_setup(cfg);
    const auto params = sample_parameters(cfg.s, cfg.n_snapshots, 5);
    std::vector<Trajectory> trajs;
    for (const auto& y : params) {
        trajs.push_back(tps_run(setup.mesh, setup.grams, setup.noise, setup.m0,
                                y, setup.tps));
    }
    const ReducedBasis basis = pod_compute(
        collect_snapshots(trajs, Quantity::Velocity), setup.grams);

    SUBCASE("training error equals the singular tail for every dimension") {
        const double total = basis.singular_values.squaredNorm();
        for (int j = 1; j <= basis.dimension(); ++j) {
            const double err = projection_error(truncate_to_dim(basis, j),
                                                setup.grams, trajs,
                                                Quantity::Velocity);
            double tail = 0.0;
            for (int i = j; i < basis.singular_values.size(); ++i) {
                tail += basis.singular_values[i] * basis.singular_values[i];
            }
            CHECK(std::abs(err * err - tail) <= 1e-8 * total + 1e-14);
        }
    }

    SUBCASE("error is monotone in the dimension on a test set") {
        const auto test_params = sample_parameters(cfg.s, cfg.n_test, 6);
        std::vector<Trajectory> test;
        for (const auto& y : test_params) {
            test.push_back(tps_run(setup.mesh, setup.grams, setup.noise,
                                   setup.m0, y, setup.tps));
        }
        double prev = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= basis.dimension(); ++j) {
            const double err =
                projection_error(truncate_to_dim(basis, j), setup.grams, test,
                                 Quantity::Velocity);
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
    }

    SUBCASE("full-rank projection of training members vanishes") {
        const double err = projection_error(basis, setup.grams, trajs,
                                            Quantity::Velocity);
        CHECK(err < 1e-10 * std::max(1.0, basis.singular_values[0]));
    }

    SUBCASE("random competitor subspaces are never better on training data") {
        std::mt19937 rng(51);
        const int j = 2;
        const double optimal = projection_error(
            truncate_to_dim(basis, j), setup.grams, trajs, Quantity::Velocity);
        for (int trial = 0; trial < 20; ++trial) {
            ReducedBasis competitor;
            competitor.gram = GramKind::H1Vec;
            competitor.phi = q_orthonormal_columns(setup.grams, j, rng);
            competitor.singular_values = Eigen::VectorXd::Ones(j);
            const double err = projection_error(competitor, setup.grams, trajs,
                                                Quantity::Velocity);
            CHECK(err >= optimal - 1e-10);
        }
    }
}
