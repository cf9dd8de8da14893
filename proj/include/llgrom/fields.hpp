#ifndef LLGROM_FIELDS_HPP
#define LLGROM_FIELDS_HPP

#include <Eigen/Dense>

namespace llgrom {

// Coefficients of a scalar P1 function (one value per mesh node).
struct FeScalarField {
    Eigen::VectorXd coeffs;

    FeScalarField() = default;
    explicit FeScalarField(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    static FeScalarField zero(int n_nodes) {
        return FeScalarField(Eigen::VectorXd::Zero(n_nodes));
    }
    int size() const { return static_cast<int>(coeffs.size()); }
};

// Coefficients of an R^3-valued P1 function, stored component-blocked:
// all x values, then all y values, then all z values.
struct FeVectorField {
    Eigen::VectorXd coeffs;

    FeVectorField() = default;
    explicit FeVectorField(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    static FeVectorField zero(int n_nodes) {
        return FeVectorField(Eigen::VectorXd::Zero(3 * n_nodes));
    }

    int n_nodes() const { return static_cast<int>(coeffs.size()) / 3; }

    Eigen::Vector3d at_node(int k) const {
        const int n = n_nodes();
        return {coeffs[k], coeffs[n + k], coeffs[2 * n + k]};
    }
    void set_node(int k, const Eigen::Vector3d& v) {
        const int n = n_nodes();
        coeffs[k] = v[0];
        coeffs[n + k] = v[1];
        coeffs[2 * n + k] = v[2];
    }

    auto component(int c) { return coeffs.segment(c * n_nodes(), n_nodes()); }
    auto component(int c) const {
        return coeffs.segment(c * n_nodes(), n_nodes());
    }
};

// Nodewise Euclidean norms (one per node).
Eigen::VectorXd nodal_moduli(const FeVectorField& w);

// Divide every nodal vector by its modulus. Throws if a node vanishes.
FeVectorField normalize_nodewise(const FeVectorField& w);

}  // namespace llgrom

#endif
