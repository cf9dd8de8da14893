#include <doctest.h>

#include <cmath>
#include <random>

#include "llgrom/sparse_grid.hpp"

using namespace llgrom;

TEST_CASE("inverse error function") {
    CHECK(erf_inv(0.0) == 0.0);
    for (double x : {-0.95, -0.5, -0.1, 0.2, 0.77, 0.999}) {
        CHECK(std::erf(erf_inv(x)) == doctest::Approx(x).epsilon(1e-13));
    }
    CHECK_THROWS(erf_inv(1.0));
    CHECK_THROWS(erf_inv(-1.5));
}

TEST_CASE("1d node family") {
    CHECK(nodes_1d(0) == std::vector<double>{0.0});
    CHECK(nodes_1d(1).size() == 3);
    CHECK(nodes_1d(2).size() == 7);

    const auto level1 = nodes_1d(1);
    CHECK(level1[1] == 0.0);
    CHECK(level1[0] == doctest::Approx(-1.3489795003921634).epsilon(1e-10));
    CHECK(level1[2] == doctest::Approx(1.3489795003921634).epsilon(1e-10));
    // inverse check through the forward error function
    CHECK(std::erf(level1[2] / (2.0 * std::sqrt(2.0))) ==
          doctest::Approx(0.5).epsilon(1e-13));

    SUBCASE("symmetry and nestedness") {
        for (int nu = 1; nu <= 4; ++nu) {
            const auto coarse = nodes_1d(nu - 1);
            const auto fine = nodes_1d(nu);
            for (size_t i = 0; i < fine.size(); ++i) {
                CHECK(fine[i] ==
                      doctest::Approx(-fine[fine.size() - 1 - i])
                          .epsilon(1e-14));
            }
            for (double x : coarse) {
                bool found = false;
                for (double y : fine) {
                    if (x == y) {  // canonical evaluation is bit-identical
                        found = true;
                        break;
                    }
                }
                CHECK(found);
            }
        }
    }
}

TEST_CASE("1d interpolation") {
    SUBCASE("level zero is the constant") {
        CHECK(interp_1d(0, {3.5}, 1, -10.0) == 3.5);
        CHECK(interp_1d(0, {3.5}, 1, 2.0) == 3.5);
    }

    SUBCASE("constants are reproduced at any level and degree") {
        for (int nu : {1, 2, 3}) {
            const int m = static_cast<int>(nodes_1d(nu).size());
            for (int p : {1, 2}) {
                if (p + 1 > m) continue;
                const std::vector<double> vals(m, 7.25);
                for (double x : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
                    CHECK(interp_1d(nu, vals, p, x) ==
                          doctest::Approx(7.25).epsilon(1e-14));
                }
            }
        }
    }

    SUBCASE("interpolatory at the nodes") {
        std::mt19937 rng(5);
        std::normal_distribution<double> dist;
        for (int nu : {1, 2, 3}) {
            const auto nodes = nodes_1d(nu);
            std::vector<double> vals(nodes.size());
            for (auto& v : vals) v = dist(rng);
            for (int p : {1, 2}) {
                if (p + 1 > static_cast<int>(nodes.size())) continue;
                for (size_t k = 0; k < nodes.size(); ++k) {
                    CHECK(interp_1d(nu, vals, p, nodes[k]) ==
                          doctest::Approx(vals[k]).epsilon(1e-12));
                }
            }
        }
    }

    SUBCASE("left extension of the boundary polynomial") {
        const auto nodes = nodes_1d(1);  // (x1, 0, x3)
        const std::vector<double> vals = {2.0, -1.0, 0.5};
        const double x = nodes[0] - 0.7;
        const double expected =
            vals[0] + (x - nodes[0]) * (vals[1] - vals[0]) / (0.0 - nodes[0]);
        CHECK(interp_1d(1, vals, 1, x) ==
              doctest::Approx(expected).epsilon(1e-13));
    }

    SUBCASE("degree above the node count is rejected") {
        CHECK_THROWS(interp_1d(1, {1.0, 2.0, 3.0}, 3, 0.0));
    }
}

TEST_CASE("profit function spot values") {
    CHECK(profit({0, 0, 0}, 1) == 1.0);
    CHECK(profit({0, 0}, 3) == 1.0);
    for (int p : {1, 2, 3}) {
        CHECK(profit({1}, p) == doctest::Approx(1.0 / (2.0 * p)));
    }
    CHECK(profit({2}, 1) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("threshold index sets") {
    SUBCASE("loose threshold keeps only the root") {
        const MultiIndexSet set = build_index_set(3, 1.5, 1);
        CHECK(set.size() == 1);
        CHECK(set.contains({0, 0, 0}));
    }

    SUBCASE("one-dimensional walk matches the profit values") {
        const MultiIndexSet set = build_index_set(1, 0.3, 1);
        CHECK(set.size() == 2);  // {0} and {1}: P(1) = 1/2, P(2) = 1/16
        CHECK(set.contains({0}));
        CHECK(set.contains({1}));
    }

    SUBCASE("downward closed and complete against brute force") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> logeps(-9.0, 0.0);
        for (int trial = 0; trial < 20; ++trial) {
            const double eps = std::exp(logeps(rng));
            const MultiIndexSet set = build_index_set(3, eps, 1);
            CHECK(set.is_downward_closed());
            // every box index with profit above the threshold is present
            for (int a = 0; a <= 6; ++a) {
                for (int b = 0; b <= 6; ++b) {
                    for (int c = 0; c <= 6; ++c) {
                        if (profit({a, b, c}, 1) > eps) {
                            CHECK(set.contains({a, b, c}));
                        }
                    }
                }
            }
            // and everything present is either profitable or an ancestor of
            // a profitable index (downward closure)
            for (const auto& nu : set.indices) {
                bool justified = profit(nu, 1) > eps;
                if (!justified) {
                    for (const auto& other : set.indices) {
                        bool dominates = true;
                        for (int i = 0; i < 3; ++i) {
                            if (other[i] < nu[i]) {
                                dominates = false;
                                break;
                            }
                        }
                        if (dominates && other != nu &&
                            profit(other, 1) > eps) {
                            justified = true;
                            break;
                        }
                    }
                }
                const bool is_root =
                    nu == MultiIndex{0, 0, 0};
                CHECK((justified || is_root));
            }
        }
    }

    SUBCASE("cardinality cap trips") {
        CHECK_THROWS(build_index_set(2, 1e-30, 1, 50));
    }
}

namespace {

// brute-force full tensor interpolation on the level-(1,1) grid, degree 1
double tensor_oracle(const std::vector<double>& xs,
                     const std::vector<double>& ys,
                     const Eigen::MatrixXd& values, double qx, double qy) {
    const auto weights_1d = [](const std::vector<double>& nodes, double x) {
        std::vector<double> w(nodes.size(), 0.0);
        size_t k = 0;
        while (k + 2 < nodes.size() && x >= nodes[k + 1]) {
            ++k;
        }
        const double t = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
        w[k] = 1.0 - t;
        w[k + 1] = t;
        return w;
    };
    const auto wx = weights_1d(xs, qx);
    const auto wy = weights_1d(ys, qy);
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        for (size_t j = 0; j < ys.size(); ++j) {
            acc += wx[i] * wy[j] * values(i, j);
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("sparse grid operator") {
    SUBCASE("constants are reproduced") {
        const MultiIndexSet set = build_index_set(2, 1e-3, 1);
        const SparseGridOp op(set, 1);
        std::vector<Eigen::VectorXd> values(op.num_nodes(),
                                            Eigen::VectorXd::Constant(1, 4.2));
        Eigen::VectorXd q(2);
        q << 0.3, -1.7;
        CHECK(op.interpolate(values, q)[0] ==
              doctest::Approx(4.2).epsilon(1e-13));
    }

    SUBCASE("interpolatory at every grid node") {
        const MultiIndexSet set = build_index_set(2, 1e-4, 1);
        const SparseGridOp op(set, 1);
        std::mt19937 rng(19);
        std::normal_distribution<double> dist;
        std::vector<Eigen::VectorXd> values;
        for (int i = 0; i < op.num_nodes(); ++i) {
            values.push_back(Eigen::VectorXd::Constant(1, dist(rng)));
        }
        for (int i = 0; i < op.num_nodes(); ++i) {
            CHECK(op.interpolate(values, op.nodes()[i])[0] ==
                  doctest::Approx(values[i][0]).epsilon(1e-12));
        }
    }

    SUBCASE("full box equals the tensor-product oracle") {
        MultiIndexSet box;
        box.s = 2;
        box.indices = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        const SparseGridOp op(box, 1);

        const auto xs = nodes_1d(1);
        std::mt19937 rng(23);
        std::normal_distribution<double> dist;
        Eigen::MatrixXd grid_vals(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                grid_vals(i, j) = dist(rng);
            }
        }
        std::vector<Eigen::VectorXd> values(op.num_nodes());
        for (int n = 0; n < op.num_nodes(); ++n) {
            const Eigen::VectorXd& node = op.nodes()[n];
            int i = -1, j = -1;
            for (int k = 0; k < 3; ++k) {
                if (node[0] == xs[k]) i = k;
                if (node[1] == xs[k]) j = k;
            }
            REQUIRE(i >= 0);
            REQUIRE(j >= 0);
            values[n] = Eigen::VectorXd::Constant(1, grid_vals(i, j));
        }
        std::uniform_real_distribution<double> unif(-2.5, 2.5);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd q(2);
            q << unif(rng), unif(rng);
            const double expected =
                tensor_oracle(xs, xs, grid_vals, q[0], q[1]);
            CHECK(op.interpolate(values, q)[0] ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }

    SUBCASE("telescoping: full boxes reduce to the top tensor grid") {
        for (int top : {1, 2}) {
            MultiIndexSet box;
            box.s = 2;
            for (int a = 0; a <= top; ++a) {
                for (int b = 0; b <= top; ++b) {
                    box.indices.push_back({a, b});
                }
            }
            const SparseGridOp op(box, 1);

            MultiIndexSet single;
            single.s = 2;
            for (int a = 0; a <= top; ++a) {
                for (int b = 0; b <= top; ++b) {
                    single.indices.push_back({a, b});
                }
            }
            // evaluate a smooth function at nodes, compare against dense
            // tensor interpolation through the same 1d machinery
            const auto f = [](const Eigen::VectorXd& y) {
                return std::sin(y[0]) + 0.3 * y[1];
            };
            std::vector<Eigen::VectorXd> values;
            for (const auto& node : op.nodes()) {
                values.push_back(Eigen::VectorXd::Constant(1, f(node)));
            }
            const auto nodes = nodes_1d(top);
            std::mt19937 rng(29);
            std::uniform_real_distribution<double> unif(-2.0, 2.0);
            for (int trial = 0; trial < 25; ++trial) {
                Eigen::VectorXd q(2);
                q << unif(rng), unif(rng);
                // dense tensor interpolant over the top grid
                std::vector<double> col(nodes.size());
                for (size_t i = 0; i < nodes.size(); ++i) {
                    std::vector<double> row(nodes.size());
                    for (size_t j = 0; j < nodes.size(); ++j) {
                        Eigen::VectorXd node(2);
                        node << nodes[i], nodes[j];
                        row[j] = f(node);
                    }
                    col[i] = interp_1d(top, row, 1, q[1]);
                }
                const double expected = interp_1d(top, col, 1, q[0]);
                CHECK(op.interpolate(values, q)[0] ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }

    SUBCASE("active dimensions grow as the threshold shrinks") {
        int prev = 0;
        for (double eps : {0.4, 0.1, 0.02, 0.004}) {
            const MultiIndexSet set = build_index_set(6, eps, 1);
            const SparseGridOp op(set, 1);
            CHECK(op.num_active_dimensions() >= prev);
            prev = op.num_active_dimensions();
        }
        CHECK(prev >= 1);
    }

    SUBCASE("missing samples are rejected") {
        const MultiIndexSet set = build_index_set(2, 0.3, 1);
        const SparseGridOp op(set, 1);
        std::vector<Eigen::VectorXd> short_values(
            std::max(0, op.num_nodes() - 1), Eigen::VectorXd::Zero(1));
        Eigen::VectorXd q = Eigen::VectorXd::Zero(2);
        CHECK_THROWS(op.interpolate(short_values, q));
    }
}
