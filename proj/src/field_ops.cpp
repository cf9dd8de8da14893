#include "llgrom/field_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "llgrom/quadrature.hpp"

namespace llgrom {

NoiseModel make_noise_model(FeVectorField g, ExternalField h_ext) {
    for (int k = 0; k < g.n_nodes(); ++k) {
        if (std::abs(g.at_node(k).norm() - 1.0) > 1e-10) {
            throw std::invalid_argument(
                "make_noise_model: g is not unit-modulus at node " +
                std::to_string(k));
        }
    }
    return NoiseModel{std::move(g), std::move(h_ext)};
}

Eigen::Vector3d rot_exp(double w, const Eigen::Vector3d& g,
                        const Eigen::Vector3d& phi) {
    if (std::abs(g.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("rot_exp: g must be unit-modulus");
    }
    const Eigen::Vector3d g1 = phi.cross(g);
    const Eigen::Vector3d g2 = g1.cross(g);
    return phi + std::sin(w) * g1 + (1.0 - std::cos(w)) * g2;
}

FeVectorField apply_rotation(double w, const FeVectorField& g,
                             const FeVectorField& field) {
    const int n = field.n_nodes();
    FeVectorField out = FeVectorField::zero(n);
    for (int k = 0; k < n; ++k) {
        out.set_node(k, rot_exp(w, g.at_node(k), field.at_node(k)));
    }
    return out;
}

SpMat assemble_system_matrix(const TriMesh& mesh, const GramSet& grams,
                             const FeVectorField& m_hat, double alpha,
                             double tau) {
    if (alpha <= 0.0 || tau <= 0.0) {
        throw std::invalid_argument(
            "assemble_system_matrix: alpha and tau must be positive");
    }
    const int n = mesh.num_nodes();
    const auto& rule = tri_quadrature();

    // cross term <m_hat x phi_j, phi_i>: entry couples components via
    // (m x e_c) . e_d = m . (e_c x e_d), i.e. the Levi-Civita contraction
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(54 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        double pair_m[3][3][3] = {};  // integral of lambda_a lambda_b m_e
        for (const auto& qp : rule) {
            const double lam[3] = {qp.l0, qp.l1, qp.l2};
            Eigen::Vector3d mx = Eigen::Vector3d::Zero();
            for (int k = 0; k < 3; ++k) {
                mx += lam[k] * m_hat.at_node(tri[k]);
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const double s = area * qp.w * lam[a] * lam[b];
                    for (int e = 0; e < 3; ++e) {
                        pair_m[a][b][e] += s * mx[e];
                    }
                }
            }
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                // (c, d) runs over trial/test components; e = third index
                for (int c = 0; c < 3; ++c) {
                    const int d1 = (c + 1) % 3, e1 = (c + 2) % 3;
                    // e_c x e_d = +e_e for cyclic (c, d, e)
                    trips.emplace_back(d1 * n + tri[a], c * n + tri[b],
                                       pair_m[a][b][e1]);
                    trips.emplace_back(e1 * n + tri[a], c * n + tri[b],
                                       -pair_m[a][b][d1]);
                }
            }
        }
    }
    SpMat cross(3 * n, 3 * n);
    cross.setFromTriplets(trips.begin(), trips.end());
    return alpha * grams.mass_vec + cross + tau * grams.stiff_vec;
}

Eigen::VectorXd assemble_load(const TriMesh& mesh, const GramSet& grams,
                              const NoiseModel& noise,
                              const FeVectorField& m_hat, double w_val,
                              double t) {
    const int n = mesh.num_nodes();
    const FeVectorField rotated = apply_rotation(w_val, noise.g, m_hat);
    // -R^T K R m_hat, applying the transposed nodewise rotation as rot by -W
    Eigen::VectorXd f =
        -apply_rotation(-w_val, noise.g,
                        FeVectorField(grams.stiff_vec * rotated.coeffs))
             .coeffs;
    if (noise.h_ext) {
        FeVectorField hext = FeVectorField::zero(n);
        for (int k = 0; k < n; ++k) {
            hext.set_node(k, noise.h_ext(t, mesh.nodes[k]));
        }
        const FeVectorField back = apply_rotation(-w_val, noise.g, hext);
        f += grams.mass_vec * back.coeffs;
    }
    return f;
}

}  // namespace llgrom
