#include "llgrom/sgrbp.hpp"

#include <stdexcept>

namespace llgrom {

SgRbpSurrogate sgrbp_build(const TriMesh& mesh, const GramSet& grams,
                           const NoiseModel& noise, const PointFunction& m0,
                           const TpsConfig& cfg, const ReducedBasis& m_basis,
                           const SparseGridOp& grid_op) {
    cfg.validate();
    if (m_basis.gram != GramKind::H1Vec) {
        throw std::invalid_argument("sgrbp_build: magnetization basis expected");
    }
    const int n_steps = cfg.num_steps();
    const int k = m_basis.dimension();

    SgRbpSurrogate surrogate{grid_op, m_basis, cfg, {}};
    surrogate.node_coeffs.reserve(grid_op.num_nodes());
    for (int node = 0; node < grid_op.num_nodes(); ++node) {
        const ParamVector y(grid_op.nodes()[node]);
        try {
            const Trajectory traj = tps_run(mesh, grams, noise, m0, y, cfg);
            Eigen::VectorXd coeffs(static_cast<Eigen::Index>(n_steps + 1) * k);
            for (int n = 0; n <= n_steps; ++n) {
                coeffs.segment(static_cast<Eigen::Index>(n) * k, k) =
                    m_basis.phi.transpose() *
                    (grams.q_vec * traj.magnetizations[n].coeffs);
            }
            surrogate.node_coeffs.push_back(std::move(coeffs));
        } catch (const std::exception& e) {
            throw std::runtime_error("sgrbp_build: node " +
                                     std::to_string(node) + ": " + e.what());
        }
    }
    return surrogate;
}

std::vector<FeVectorField> sgrbp_eval(const SgRbpSurrogate& surrogate,
                                      const ParamVector& y_query) {
    if (y_query.dim() != surrogate.grid_op.dim()) {
        throw std::invalid_argument("sgrbp_eval: parameter dimension mismatch");
    }
    const int k = surrogate.m_basis.dimension();
    const int n_steps = surrogate.cfg.num_steps();
    const Eigen::VectorXd flat =
        surrogate.grid_op.interpolate(surrogate.node_coeffs, y_query.y);

    std::vector<FeVectorField> out;
    out.reserve(n_steps + 1);
    for (int n = 0; n <= n_steps; ++n) {
        out.emplace_back(surrogate.m_basis.phi *
                         flat.segment(static_cast<Eigen::Index>(n) * k, k));
    }
    return out;
}

}  // namespace llgrom
