#ifndef LLGROM_ASSEMBLY_HPP
#define LLGROM_ASSEMBLY_HPP

#include <functional>

#include "llgrom/fields.hpp"
#include "llgrom/linalg.hpp"
#include "llgrom/mesh.hpp"

namespace llgrom {

// Pointwise function on the unit square with values in R^3.
using PointFunction =
    std::function<Eigen::Vector3d(const Eigen::Vector2d& x)>;

// Gram matrices of the P1 spaces. Scalar matrices are N_h x N_h; the vector
// variants are their 3-block-diagonal liftings with component-blocked dof
// ordering. q_vec = mass_vec + stiff_vec realizes the full H^1(D)^3 inner
// product.
struct GramSet {
    SpMat mass_scalar;
    SpMat stiff_scalar;
    SpMat mass_vec;
    SpMat stiff_vec;
    SpMat q_vec;
};

GramSet assemble_gram(const TriMesh& mesh);

// L^2 projection onto the vector P1 space: solves mass_vec * c = load(f).
FeVectorField l2_project(const TriMesh& mesh, const GramSet& grams,
                         const PointFunction& f);

// Nodal interpolation: coefficients are f evaluated at the mesh nodes.
FeVectorField nodal_interpolate(const TriMesh& mesh, const PointFunction& f);

// Constraint matrix of the discrete tangent plane: B in R^{N_h x 3N_h} with
// B_ij = <phi_j . m, psi_i>_{L^2(D)} for vector basis functions phi_j and
// scalar test functions psi_i.
SpMat assemble_constraint(const TriMesh& mesh, const FeVectorField& m);

}  // namespace llgrom

#endif
