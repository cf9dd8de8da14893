#include "llgrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llgrom/fields.hpp"

namespace llgrom {

TriMesh build_structured_mesh(int n_div) {
    if (n_div < 1) {
        throw std::invalid_argument(
            "build_structured_mesh: n_div must be >= 1");
    }
    TriMesh mesh;
    mesh.n_div = n_div;
    mesh.h = 1.0 / n_div;

    const int np = n_div + 1;
    mesh.nodes.reserve(static_cast<size_t>(np) * np);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            mesh.nodes.emplace_back(static_cast<double>(i) / n_div,
                                    static_cast<double>(j) / n_div);
        }
    }

    auto node_id = [np](int i, int j) { return j * np + i; };
    mesh.triangles.reserve(2 * static_cast<size_t>(n_div) * n_div);
    for (int j = 0; j < n_div; ++j) {
        for (int i = 0; i < n_div; ++i) {
            const int a = node_id(i, j);
            const int b = node_id(i + 1, j);
            const int c = node_id(i + 1, j + 1);
            const int d = node_id(i, j + 1);
            // split along the a -> c diagonal, both triangles oriented ccw
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    }
    return mesh;
}

double triangle_area(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d e1 = mesh.nodes[tri[1]] - mesh.nodes[tri[0]];
    const Eigen::Vector2d e2 = mesh.nodes[tri[2]] - mesh.nodes[tri[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

std::array<Eigen::Vector2d, 3> triangle_grads(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d p0 = mesh.nodes[tri[0]];
    const Eigen::Vector2d p1 = mesh.nodes[tri[1]];
    const Eigen::Vector2d p2 = mesh.nodes[tri[2]];
    const double inv2a = 1.0 / (2.0 * triangle_area(mesh, t));
    // grad lambda_k is the inward normal of the opposite edge over 2|T|
    std::array<Eigen::Vector2d, 3> g;
    g[0] = inv2a * Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x());
    g[1] = inv2a * Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x());
    g[2] = inv2a * Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x());
    return g;
}

int locate_triangle(const TriMesh& mesh, const Eigen::Vector2d& x) {
    const int n = mesh.n_div;
    const double gx = x.x() * n;
    const double gy = x.y() * n;
    int i = std::clamp(static_cast<int>(std::floor(gx)), 0, n - 1);
    int j = std::clamp(static_cast<int>(std::floor(gy)), 0, n - 1);
    const double fx = gx - i;
    const double fy = gy - j;
    const int cell = 2 * (j * n + i);
    // lower triangle of the cell is below the ll -> ur diagonal (fy <= fx)
    return (fy <= fx) ? cell : cell + 1;
}

Eigen::VectorXd nodal_moduli(const FeVectorField& w) {
    const int n = w.n_nodes();
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
        out[k] = w.at_node(k).norm();
    }
    return out;
}

FeVectorField normalize_nodewise(const FeVectorField& w) {
    const int n = w.n_nodes();
    FeVectorField out = w;
    for (int k = 0; k < n; ++k) {
        const double r = w.at_node(k).norm();
        if (r == 0.0) {
            throw std::runtime_error(
                "normalize_nodewise: field vanishes at node " +
                std::to_string(k));
        }
        out.set_node(k, w.at_node(k) / r);
    }
    return out;
}

}  // namespace llgrom
