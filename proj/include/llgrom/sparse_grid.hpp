#ifndef LLGROM_SPARSE_GRID_HPP
#define LLGROM_SPARSE_GRID_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace llgrom {

using MultiIndex = std::vector<int>;

// Finite downward-closed set of multi-indices in N_0^s.
struct MultiIndexSet {
    int s = 0;
    std::vector<MultiIndex> indices;  // sorted lexicographically

    bool contains(const MultiIndex& nu) const;
    bool is_downward_closed() const;
    int size() const { return static_cast<int>(indices.size()); }
};

// Inverse error function by safeguarded Newton on std::erf (|residual| <= 1e-14).
double erf_inv(double x);

// Nested 1D node family: level 0 is {0}; level nu >= 1 holds
// m(nu) = 2^{nu+1} - 1 nodes phi(i / 2^nu - 1) with phi(x) = 2 sqrt(2) erfinv(x).
std::vector<double> nodes_1d(int nu);

// Evaluation weights of the 1D piecewise-polynomial interpolant of degree p
// at x: I_nu[f](x) = sum_k w_k f(nodes[k]). Degree 1 uses consecutive node
// intervals; higher degrees use disjoint groups of p+1 nodes from the left
// with a right-aligned final group. Outside the nodes (or in a group gap)
// the nearby polynomial is extended.
std::vector<std::pair<int, double>> interp_weights_1d(int nu, int p, double x);

double interp_1d(int nu, const std::vector<double>& values, int p, double x);

// Profit of a multi-index (coordinates are 1-based in the weight exponents).
double profit(const MultiIndex& nu, int p);

// All multi-indices with profit strictly above eps, closed downward; the zero
// index is always included. Throws if the set would exceed max_cardinality.
MultiIndexSet build_index_set(int s, double eps, int p,
                              int max_cardinality = 200000);

// Combination-technique interpolation operator over the sparse grid spanned
// by a downward-closed index set.
class SparseGridOp {
  public:
    SparseGridOp(MultiIndexSet index_set, int p);

    const MultiIndexSet& index_set() const { return index_set_; }
    int degree() const { return p_; }
    int dim() const { return index_set_.s; }
    const std::vector<Eigen::VectorXd>& nodes() const { return nodes_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }

    // Coordinates with a nonzero level somewhere in the index set.
    int num_active_dimensions() const;

    // Evaluates the interpolant at y; node_values must hold one value vector
    // per grid node, aligned with nodes().
    Eigen::VectorXd interpolate(
        const std::vector<Eigen::VectorXd>& node_values,
        const Eigen::VectorXd& y) const;

  private:
    struct TensorTerm {
        MultiIndex levels;
        double coeff;
        std::vector<int> dims;      // nodes per coordinate
        std::vector<int> node_ids;  // row-major global ids
    };

    MultiIndexSet index_set_;
    int p_;
    std::vector<Eigen::VectorXd> nodes_;
    std::vector<TensorTerm> terms_;
};

}  // namespace llgrom

#endif
