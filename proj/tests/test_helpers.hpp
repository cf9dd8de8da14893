#ifndef LLGROM_TEST_HELPERS_HPP
#define LLGROM_TEST_HELPERS_HPP

#include <array>
#include <random>

#include "llgrom/assembly.hpp"
#include "llgrom/quadrature.hpp"

namespace llgrom::testing {

// Symmetric 12-point degree-6 triangle rule; test-side oracle only, kept
// separate from the library's rule on purpose.
struct OracleQuadPoint {
    double l0, l1, l2, w;
};

inline const std::array<OracleQuadPoint, 12>& oracle_quadrature() {
    static const std::array<OracleQuadPoint, 12> rule = [] {
        std::array<OracleQuadPoint, 12> r{};
        const double a1 = 0.873821971016996, b1 = 0.063089014491502,
                     w1 = 0.050844906370207;
        const double a2 = 0.501426509658179, b2 = 0.249286745170910,
                     w2 = 0.116786275726379;
        const double a3 = 0.053145049844816, b3 = 0.310352451033785,
                     c3 = 0.636502499121399, w3 = 0.082851075618374;
        int k = 0;
        r[k++] = {a1, b1, b1, w1};
        r[k++] = {b1, a1, b1, w1};
        r[k++] = {b1, b1, a1, w1};
        r[k++] = {a2, b2, b2, w2};
        r[k++] = {b2, a2, b2, w2};
        r[k++] = {b2, b2, a2, w2};
        r[k++] = {a3, b3, c3, w3};
        r[k++] = {a3, c3, b3, w3};
        r[k++] = {b3, a3, c3, w3};
        r[k++] = {b3, c3, a3, w3};
        r[k++] = {c3, a3, b3, w3};
        r[k++] = {c3, b3, a3, w3};
        return r;
    }();
    return rule;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = dist(rng);
    }
    return v;
}

inline FeVectorField random_vector_field(const TriMesh& mesh,
                                         std::mt19937& rng) {
    return FeVectorField(random_vector(3 * mesh.num_nodes(), rng));
}

inline FeVectorField random_unit_field(const TriMesh& mesh,
                                       std::mt19937& rng) {
    return normalize_nodewise(random_vector_field(mesh, rng));
}

inline FeScalarField random_scalar_field(const TriMesh& mesh,
                                         std::mt19937& rng) {
    return FeScalarField(random_vector(mesh.num_nodes(), rng));
}

}  // namespace llgrom::testing

#endif
