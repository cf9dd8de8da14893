#ifndef LLGROM_FIELD_OPS_HPP
#define LLGROM_FIELD_OPS_HPP

#include <functional>

#include "llgrom/assembly.hpp"

namespace llgrom {

// Time-dependent external field; empty function means identically zero.
using ExternalField =
    std::function<Eigen::Vector3d(double t, const Eigen::Vector2d& x)>;

// Spatial noise distribution g (pointwise unit-modulus at the nodes) plus the
// external field.
struct NoiseModel {
    FeVectorField g;
    ExternalField h_ext;
};

// Validates |g(node)| = 1 at every node (tolerance 1e-10).
NoiseModel make_noise_model(FeVectorField g, ExternalField h_ext = {});

// exp(W G) phi with G u = u x g:
//   phi + sin(W) (phi x g) + (1 - cos W) ((phi x g) x g).
// A rotation; requires |g| = 1 (checked to 1e-8).
Eigen::Vector3d rot_exp(double w, const Eigen::Vector3d& g,
                        const Eigen::Vector3d& phi);

// Nodewise application of exp(W G) followed by P1 re-interpolation.
FeVectorField apply_rotation(double w, const FeVectorField& g,
                             const FeVectorField& field);

// Velocity-dependent part of the tangent plane form at frozen magnetization:
// A_ij = alpha <phi_j, phi_i> + <m_hat x phi_j, phi_i> + tau <grad phi_j, grad phi_i>.
SpMat assemble_system_matrix(const TriMesh& mesh, const GramSet& grams,
                             const FeVectorField& m_hat, double alpha,
                             double tau);

// Right-hand side of the per-step velocity problem after cancelling the
// <grad m_hat, grad phi> contributions:
//   f_i = -<grad I_h(e^{WG} m_hat), grad I_h(e^{WG} phi_i)>
//         + <I_h(e^{-WG} H_ext(t)), phi_i>.
Eigen::VectorXd assemble_load(const TriMesh& mesh, const GramSet& grams,
                              const NoiseModel& noise,
                              const FeVectorField& m_hat, double w_val,
                              double t);

}  // namespace llgrom

#endif
