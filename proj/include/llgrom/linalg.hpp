#ifndef LLGROM_LINALG_HPP
#define LLGROM_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace llgrom {

using SpMat = Eigen::SparseMatrix<double>;

// Sparse Cholesky factor of an SPD matrix with natural ordering, so that
// Q = R^T R with R = L^T upper triangular (no permutation). Exposes the solve
// and the triangular factor applications needed by the Gram-weighted SVD.
class CholeskyFactor {
  public:
    explicit CholeskyFactor(const SpMat& q);

    int size() const { return n_; }

    // Q^{-1} b
    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

    // R x with Q = R^T R
    Eigen::MatrixXd apply_r(const Eigen::MatrixXd& x) const;

    // R^{-1} x
    Eigen::MatrixXd solve_r(const Eigen::MatrixXd& x) const;

  private:
    int n_;
    Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>
        llt_;
};

// Modified Gram-Schmidt in the Q inner product. Columns of `candidates` are
// orthonormalized left to right against `fixed` (assumed Q-orthonormal
// already) and each other; columns whose remainder falls below
// drop_tol * (original Q-norm) are discarded. Returns [fixed | accepted].
Eigen::MatrixXd orthonormalize_q(const SpMat& q, const Eigen::MatrixXd& fixed,
                                 const Eigen::MatrixXd& candidates,
                                 double drop_tol = 1e-10);

}  // namespace llgrom

#endif
