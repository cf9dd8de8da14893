#include "llgrom/assembly.hpp"

#include <stdexcept>
#include <vector>

#include "llgrom/quadrature.hpp"

namespace llgrom {

namespace {

using Triplet = Eigen::Triplet<double>;

// 3-block-diagonal lifting of a scalar matrix to component-blocked vector dofs.
SpMat lift_to_vector(const SpMat& s) {
    const int n = static_cast<int>(s.rows());
    std::vector<Triplet> trips;
    trips.reserve(3 * s.nonZeros());
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SpMat::InnerIterator it(s, k); it; ++it) {
            for (int c = 0; c < 3; ++c) {
                trips.emplace_back(c * n + static_cast<int>(it.row()),
                                   c * n + static_cast<int>(it.col()),
                                   it.value());
            }
        }
    }
    SpMat out(3 * n, 3 * n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace

GramSet assemble_gram(const TriMesh& mesh) {
    const int n = mesh.num_nodes();
    const auto& rule = tri_quadrature();

    std::vector<Triplet> mass_trips, stiff_trips;
    mass_trips.reserve(9 * mesh.num_triangles());
    stiff_trips.reserve(9 * mesh.num_triangles());

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        const auto grads = triangle_grads(mesh, t);

        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double m_ab = 0.0;
                for (const auto& qp : rule) {
                    const double la = (a == 0) ? qp.l0 : (a == 1 ? qp.l1 : qp.l2);
                    const double lb = (b == 0) ? qp.l0 : (b == 1 ? qp.l1 : qp.l2);
                    m_ab += qp.w * la * lb;
                }
                mass_trips.emplace_back(tri[a], tri[b], area * m_ab);
                stiff_trips.emplace_back(tri[a], tri[b],
                                         area * grads[a].dot(grads[b]));
            }
        }
    }

    GramSet g;
    g.mass_scalar.resize(n, n);
    g.mass_scalar.setFromTriplets(mass_trips.begin(), mass_trips.end());
    g.stiff_scalar.resize(n, n);
    g.stiff_scalar.setFromTriplets(stiff_trips.begin(), stiff_trips.end());
    g.mass_vec = lift_to_vector(g.mass_scalar);
    g.stiff_vec = lift_to_vector(g.stiff_scalar);
    g.q_vec = g.mass_vec + g.stiff_vec;
    return g;
}

FeVectorField nodal_interpolate(const TriMesh& mesh, const PointFunction& f) {
    const int n = mesh.num_nodes();
    FeVectorField out = FeVectorField::zero(n);
    for (int k = 0; k < n; ++k) {
        out.set_node(k, f(mesh.nodes[k]));
    }
    return out;
}

FeVectorField l2_project(const TriMesh& mesh, const GramSet& grams,
                         const PointFunction& f) {
    const int n = mesh.num_nodes();
    const auto& rule = tri_quadrature();

    Eigen::VectorXd load = Eigen::VectorXd::Zero(3 * n);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        for (const auto& qp : rule) {
            const Eigen::Vector2d x = qp.l0 * mesh.nodes[tri[0]] +
                                      qp.l1 * mesh.nodes[tri[1]] +
                                      qp.l2 * mesh.nodes[tri[2]];
            const Eigen::Vector3d fx = f(x);
            const double lam[3] = {qp.l0, qp.l1, qp.l2};
            for (int a = 0; a < 3; ++a) {
                const double wla = area * qp.w * lam[a];
                for (int c = 0; c < 3; ++c) {
                    load[c * n + tri[a]] += wla * fx[c];
                }
            }
        }
    }

    Eigen::SimplicialLLT<SpMat> llt(grams.mass_scalar);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("l2_project: mass matrix factorization failed");
    }
    FeVectorField out = FeVectorField::zero(n);
    for (int c = 0; c < 3; ++c) {
        out.coeffs.segment(c * n, n) = llt.solve(load.segment(c * n, n));
    }

    const double rel =
        (grams.mass_vec * out.coeffs - load).norm() / std::max(load.norm(), 1e-300);
    if (rel > 1e-10) {
        throw std::runtime_error("l2_project: residual too large");
    }
    return out;
}

SpMat assemble_constraint(const TriMesh& mesh, const FeVectorField& m) {
    const int n = mesh.num_nodes();
    if (m.n_nodes() != n) {
        throw std::invalid_argument("assemble_constraint: field size mismatch");
    }
    const auto& rule = tri_quadrature();

    std::vector<Triplet> trips;
    trips.reserve(27 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        // local block: row a (scalar test), column (b, c) (vector trial):
        // integral of lambda_a lambda_b m_c(x)
        double local[3][3][3] = {};
        for (const auto& qp : rule) {
            const double lam[3] = {qp.l0, qp.l1, qp.l2};
            Eigen::Vector3d mx = Eigen::Vector3d::Zero();
            for (int k = 0; k < 3; ++k) {
                mx += lam[k] * m.at_node(tri[k]);
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const double s = area * qp.w * lam[a] * lam[b];
                    for (int c = 0; c < 3; ++c) {
                        local[a][b][c] += s * mx[c];
                    }
                }
            }
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int c = 0; c < 3; ++c) {
                    trips.emplace_back(tri[a], c * n + tri[b], local[a][b][c]);
                }
            }
        }
    }
    SpMat bmat(n, 3 * n);
    bmat.setFromTriplets(trips.begin(), trips.end());
    return bmat;
}

}  // namespace llgrom
