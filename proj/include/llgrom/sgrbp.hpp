#ifndef LLGROM_SGRBP_HPP
#define LLGROM_SGRBP_HPP

#include "llgrom/pod.hpp"
#include "llgrom/rom.hpp"
#include "llgrom/sparse_grid.hpp"

namespace llgrom {

// Data-driven surrogate: reduced magnetization coefficients of high-fidelity
// trajectories at the sparse grid nodes, interpolated over the parameter
// space. Each node stores an (N_T + 1) x K coefficient array flattened
// time-major.
struct SgRbpSurrogate {
    SparseGridOp grid_op;
    ReducedBasis m_basis;
    TpsConfig cfg;
    std::vector<Eigen::VectorXd> node_coeffs;
};

SgRbpSurrogate sgrbp_build(const TriMesh& mesh, const GramSet& grams,
                           const NoiseModel& noise, const PointFunction& m0,
                           const TpsConfig& cfg, const ReducedBasis& m_basis,
                           const SparseGridOp& grid_op);

// Interpolates the per-step coefficients at y_query and reconstructs the
// full fields; no PDE solve and no normalization happen here.
std::vector<FeVectorField> sgrbp_eval(const SgRbpSurrogate& surrogate,
                                      const ParamVector& y_query);

}  // namespace llgrom

#endif
