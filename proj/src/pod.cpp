#include "llgrom/pod.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace llgrom {

const SpMat& gram_matrix(const GramSet& grams, GramKind kind) {
    return kind == GramKind::H1Vec ? grams.q_vec : grams.mass_scalar;
}

SnapshotSet collect_snapshots(const std::vector<Trajectory>& trajectories,
                              Quantity quantity) {
    if (trajectories.empty()) {
        throw std::invalid_argument("collect_snapshots: no trajectories");
    }
    const int n_steps = static_cast<int>(trajectories.front().velocities.size());
    SnapshotSet set;
    set.gram = (quantity == Quantity::Multiplier) ? GramKind::L2Scalar
                                                  : GramKind::H1Vec;
    const auto& first = trajectories.front();
    const int rows =
        quantity == Quantity::Multiplier
            ? first.multipliers.front().size()
            : static_cast<int>(first.velocities.front().coeffs.size());
    set.data.resize(rows, static_cast<Eigen::Index>(trajectories.size()) * n_steps);
    set.labels.reserve(trajectories.size() * n_steps);

    Eigen::Index col = 0;
    for (size_t m = 0; m < trajectories.size(); ++m) {
        const auto& traj = trajectories[m];
        for (int n = 0; n < n_steps; ++n) {
            switch (quantity) {
                case Quantity::Velocity:
                    set.data.col(col) = traj.velocities[n].coeffs;
                    break;
                case Quantity::Multiplier:
                    set.data.col(col) = traj.multipliers[n].coeffs;
                    break;
                case Quantity::Magnetization:
                    set.data.col(col) = traj.magnetizations[n + 1].coeffs;
                    break;
            }
            set.labels.emplace_back(static_cast<int>(m), n);
            ++col;
        }
    }
    return set;
}

ReducedBasis pod_compute(const SnapshotSet& snapshots, const GramSet& grams) {
    if (snapshots.data.cols() == 0) {
        throw std::invalid_argument("pod_compute: empty snapshot set");
    }
    const SpMat& q = gram_matrix(grams, snapshots.gram);
    const CholeskyFactor factor(q);

    const double scale = 1.0 / std::sqrt(static_cast<double>(snapshots.data.cols()));
    const Eigen::MatrixXd weighted = factor.apply_r(snapshots.data) * scale;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();

    int rank = 0;
    const double cutoff = (sigma.size() > 0) ? 1e-12 * sigma[0] : 0.0;
    while (rank < sigma.size() && sigma[rank] > cutoff) {
        ++rank;
    }

    ReducedBasis basis;
    basis.gram = snapshots.gram;
    basis.singular_values = sigma;
    basis.phi = factor.solve_r(svd.matrixU().leftCols(rank));
    return basis;
}

ReducedBasis truncate(const ReducedBasis& basis, double eps_pod_sq) {
    if (eps_pod_sq <= 0.0 || eps_pod_sq >= 1.0) {
        throw std::invalid_argument("truncate: eps_pod_sq must be in (0, 1)");
    }
    const double total = basis.singular_values.squaredNorm();
    if (total == 0.0) {
        throw std::invalid_argument("truncate: all singular values vanish");
    }
    double partial = 0.0;
    int j = 0;
    while (j < basis.dimension()) {
        partial += basis.singular_values[j] * basis.singular_values[j];
        ++j;
        if (partial / total >= 1.0 - eps_pod_sq) {
            break;
        }
    }
    return truncate_to_dim(basis, j);
}

ReducedBasis truncate_to_dim(const ReducedBasis& basis, int j) {
    if (j < 1 || j > basis.dimension()) {
        throw std::invalid_argument(
            "truncate_to_dim: requested dimension exceeds basis rank");
    }
    ReducedBasis out;
    out.phi = basis.phi.leftCols(j);
    out.singular_values = basis.singular_values;
    out.gram = basis.gram;
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> project(
    const ReducedBasis& basis, const GramSet& grams, const Eigen::VectorXd& w) {
    if (w.size() != basis.phi.rows()) {
        throw std::invalid_argument("project: dimension mismatch");
    }
    const SpMat& q = gram_matrix(grams, basis.gram);
    const Eigen::VectorXd coeffs = basis.phi.transpose() * (q * w);
    return {coeffs, basis.phi * coeffs};
}

double projection_error(const ReducedBasis& basis, const GramSet& grams,
                        const std::vector<Trajectory>& test_trajectories,
                        Quantity quantity) {
    if (test_trajectories.empty()) {
        throw std::invalid_argument("projection_error: empty test set");
    }
    const SnapshotSet set = collect_snapshots(test_trajectories, quantity);
    if (set.gram != basis.gram) {
        throw std::invalid_argument(
            "projection_error: basis Gram does not match quantity");
    }
    const SpMat& q = gram_matrix(grams, basis.gram);
    double acc = 0.0;
    for (Eigen::Index c = 0; c < set.data.cols(); ++c) {
        const Eigen::VectorXd w = set.data.col(c);
        const Eigen::VectorXd coeffs = basis.phi.transpose() * (q * w);
        const Eigen::VectorXd r = w - basis.phi * coeffs;
        acc += r.dot(q * r);
    }
    return std::sqrt(acc / static_cast<double>(set.data.cols()));
}

}  // namespace llgrom
