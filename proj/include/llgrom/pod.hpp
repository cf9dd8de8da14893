#ifndef LLGROM_POD_HPP
#define LLGROM_POD_HPP

#include <utility>
#include <vector>

#include "llgrom/tps.hpp"

namespace llgrom {

enum class GramKind { H1Vec, L2Scalar };

const SpMat& gram_matrix(const GramSet& grams, GramKind kind);

enum class Quantity { Magnetization, Velocity, Multiplier };

// Snapshot matrix: one column per (sample, time step).
struct SnapshotSet {
    Eigen::MatrixXd data;
    GramKind gram = GramKind::H1Vec;
    std::vector<std::pair<int, int>> labels;  // (sample index, time index)
};

// Columns per trajectory: velocities and multipliers at steps 0..N_T-1,
// magnetizations at steps 1..N_T (the states produced by the normalization).
SnapshotSet collect_snapshots(const std::vector<Trajectory>& trajectories,
                              Quantity quantity);

// Q-orthonormal POD basis with the full singular value list; phi keeps the
// columns above the numerical-rank cutoff (1e-12 relative).
struct ReducedBasis {
    Eigen::MatrixXd phi;
    Eigen::VectorXd singular_values;
    GramKind gram = GramKind::H1Vec;

    int dimension() const { return static_cast<int>(phi.cols()); }
};

// SVD of R * data / sqrt(N) with Q = R^T R; returns phi = R^{-1} U.
ReducedBasis pod_compute(const SnapshotSet& snapshots, const GramSet& grams);

// Smallest J with (sum_{j<=J} sigma_j^2) / (sum_j sigma_j^2) >= 1 - eps_pod_sq.
ReducedBasis truncate(const ReducedBasis& basis, double eps_pod_sq);

ReducedBasis truncate_to_dim(const ReducedBasis& basis, int j);

// Q-orthogonal projection onto span(phi): returns (coefficients, reconstruction).
std::pair<Eigen::VectorXd, Eigen::VectorXd> project(
    const ReducedBasis& basis, const GramSet& grams, const Eigen::VectorXd& w);

// RMS projection error over samples and steps in the basis norm
// (H^1 for magnetization/velocity, L^2 for the multiplier).
double projection_error(const ReducedBasis& basis, const GramSet& grams,
                        const std::vector<Trajectory>& test_trajectories,
                        Quantity quantity);

}  // namespace llgrom

#endif
