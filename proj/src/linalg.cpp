#include "llgrom/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace llgrom {

CholeskyFactor::CholeskyFactor(const SpMat& q) : n_(static_cast<int>(q.rows())) {
    llt_.compute(q);
    if (llt_.info() != Eigen::Success) {
        throw std::runtime_error(
            "CholeskyFactor: matrix is not positive definite");
    }
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& b) const {
    return llt_.solve(b);
}

Eigen::MatrixXd CholeskyFactor::apply_r(const Eigen::MatrixXd& x) const {
    // R = L^T (natural ordering, no permutation)
    return llt_.matrixU() * x;
}

Eigen::MatrixXd CholeskyFactor::solve_r(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out = x;
    llt_.matrixU().solveInPlace(out);
    return out;
}

Eigen::MatrixXd orthonormalize_q(const SpMat& q, const Eigen::MatrixXd& fixed,
                                 const Eigen::MatrixXd& candidates,
                                 double drop_tol) {
    const Eigen::Index n = q.rows();
    Eigen::MatrixXd basis(n, fixed.cols() + candidates.cols());
    Eigen::Index count = fixed.cols();
    basis.leftCols(count) = fixed;

    for (Eigen::Index c = 0; c < candidates.cols(); ++c) {
        Eigen::VectorXd v = candidates.col(c);
        const double norm0 = std::sqrt(v.dot(q * v));
        if (norm0 == 0.0) {
            continue;
        }
        // two MGS sweeps
        for (int sweep = 0; sweep < 2; ++sweep) {
            Eigen::VectorXd qv = q * v;
            for (Eigen::Index k = 0; k < count; ++k) {
                v -= basis.col(k).dot(qv) * basis.col(k);
                qv = q * v;
            }
        }
        const double norm1 = std::sqrt(std::max(0.0, v.dot(q * v)));
        if (norm1 <= drop_tol * norm0) {
            continue;
        }
        basis.col(count++) = v / norm1;
    }
    return basis.leftCols(count);
}

}  // namespace llgrom
