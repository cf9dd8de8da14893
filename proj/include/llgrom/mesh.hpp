#ifndef LLGROM_MESH_HPP
#define LLGROM_MESH_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace llgrom {

// Structured triangulation of the unit square: (n_div+1)^2 nodes on a uniform
// lattice, each grid cell split along its lower-left -> upper-right diagonal
// into two triangles with positive orientation.
struct TriMesh {
    int n_div = 0;
    double h = 0.0;
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> triangles;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

TriMesh build_structured_mesh(int n_div);

// Signed area of triangle t (positive for all triangles of a valid mesh).
double triangle_area(const TriMesh& mesh, int t);

// Constant gradients of the three barycentric (P1 hat) functions on triangle t.
std::array<Eigen::Vector2d, 3> triangle_grads(const TriMesh& mesh, int t);

// Index of the triangle containing point x (ties resolved consistently);
// valid for x in [0,1]^2.
int locate_triangle(const TriMesh& mesh, const Eigen::Vector2d& x);

}  // namespace llgrom

#endif
