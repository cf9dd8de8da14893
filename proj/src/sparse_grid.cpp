#include "llgrom/sparse_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace llgrom {

bool MultiIndexSet::contains(const MultiIndex& nu) const {
    return std::binary_search(indices.begin(), indices.end(), nu);
}

bool MultiIndexSet::is_downward_closed() const {
    for (const auto& nu : indices) {
        MultiIndex lower = nu;
        for (int i = 0; i < s; ++i) {
            if (nu[i] > 0) {
                lower[i] -= 1;
                if (!contains(lower)) {
                    return false;
                }
                lower[i] += 1;
            }
        }
    }
    return true;
}

double erf_inv(double x) {
    if (!(x > -1.0 && x < 1.0)) {
        throw std::invalid_argument("erf_inv: argument must be in (-1, 1)");
    }
    if (x == 0.0) {
        return 0.0;
    }
    double lo = -7.0, hi = 7.0;
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double r = std::erf(t) - x;
        if (std::abs(r) <= 1e-14) {
            return t;
        }
        (r > 0.0 ? hi : lo) = t;
        const double deriv = 2.0 / std::sqrt(M_PI) * std::exp(-t * t);
        double step = t - r / deriv;
        t = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    return t;
}

std::vector<double> nodes_1d(int nu) {
    if (nu < 0) {
        throw std::invalid_argument("nodes_1d: level must be >= 0");
    }
    if (nu == 0) {
        return {0.0};
    }
    const int m = (1 << (nu + 1)) - 1;
    std::vector<double> out(m);
    const double denom = std::ldexp(1.0, nu);  // (m + 1) / 2
    for (int i = 1; i <= m; ++i) {
        out[i - 1] = 2.0 * std::sqrt(2.0) * erf_inv(i / denom - 1.0);
    }
    return out;
}

namespace {

int num_nodes_1d(int nu) { return nu == 0 ? 1 : (1 << (nu + 1)) - 1; }

// first node index of the polynomial group used at x
int select_group(const std::vector<double>& nodes, int p, double x) {
    const int m = static_cast<int>(nodes.size());
    std::vector<int> starts;
    if (p == 1) {
        for (int k = 0; k + 1 < m; ++k) starts.push_back(k);
    } else {
        for (int k = 0; k + p < m; k += p + 1) starts.push_back(k);
        if (starts.empty() || starts.back() + p < m - 1) {
            starts.push_back(m - 1 - p);
        }
    }
    int chosen = 0;
    for (size_t g = 1; g < starts.size(); ++g) {
        if (x >= nodes[starts[g]]) {
            chosen = static_cast<int>(g);
        }
    }
    return starts[chosen];
}

}  // namespace

std::vector<std::pair<int, double>> interp_weights_1d(int nu, int p, double x) {
    if (p < 1) {
        throw std::invalid_argument("interp_weights_1d: degree must be >= 1");
    }
    if (nu == 0) {
        return {{0, 1.0}};
    }
    const int m = num_nodes_1d(nu);
    if (p + 1 > m) {
        throw std::invalid_argument(
            "interp_weights_1d: degree exceeds the available nodes");
    }
    const std::vector<double> nodes = nodes_1d(nu);
    const int start = select_group(nodes, p, x);

    std::vector<std::pair<int, double>> weights(p + 1);
    for (int k = 0; k <= p; ++k) {
        double w = 1.0;
        for (int l = 0; l <= p; ++l) {
            if (l != k) {
                w *= (x - nodes[start + l]) /
                     (nodes[start + k] - nodes[start + l]);
            }
        }
        weights[k] = {start + k, w};
    }
    return weights;
}

double interp_1d(int nu, const std::vector<double>& values, int p, double x) {
    if (static_cast<int>(values.size()) != num_nodes_1d(nu)) {
        throw std::invalid_argument("interp_1d: sample count mismatch");
    }
    double acc = 0.0;
    for (const auto& [idx, w] : interp_weights_1d(nu, p, x)) {
        acc += w * values[idx];
    }
    return acc;
}

namespace {

int ceil_log2(int i) { return std::bit_width(static_cast<unsigned>(i - 1)); }

// per-coordinate profit factor; i is the 1-based coordinate index
double profit_factor(int i, int nu, int p) {
    if (nu == 0) {
        return 1.0;
    }
    const double c = ceil_log2(i);
    if (nu == 1) {
        return std::exp2(-1.5 * c) / (p * 2.0);
    }
    return std::exp2(-p * (nu + 0.5 * c)) / (p * std::exp2(nu));
}

}  // namespace

double profit(const MultiIndex& nu, int p) {
    double out = 1.0;
    for (size_t i = 0; i < nu.size(); ++i) {
        out *= profit_factor(static_cast<int>(i) + 1, nu[i], p);
    }
    return out;
}

namespace {

// Exhaustive enumeration of {nu : profit > eps}. The per-coordinate factors
// are <= 1 and decrease in the level except possibly from level 1 to 2, so a
// branch can be cut once max(f(nu), f(nu + 1)) no longer recovers the
// threshold.
void enumerate_profitable(int s, double eps, int p, int idx, double partial,
                          MultiIndex& stem, std::set<MultiIndex>& out,
                          int max_cardinality) {
    if (idx == s) {
        if (partial > eps) {
            if (static_cast<int>(out.size()) >= max_cardinality) {
                throw std::runtime_error(
                    "build_index_set: cardinality cap exceeded");
            }
            out.insert(stem);
        }
        return;
    }
    const int i = idx + 1;
    for (int nu = 0;; ++nu) {
        const double f = profit_factor(i, nu, p);
        const double best_from_here =
            (nu <= 1) ? std::max(f, profit_factor(i, nu + 1, p)) : f;
        if (nu >= 1 && partial * best_from_here <= eps) {
            break;
        }
        if (partial * f > eps) {
            stem[idx] = nu;
            enumerate_profitable(s, eps, p, idx + 1, partial * f, stem, out,
                                 max_cardinality);
            stem[idx] = 0;
        }
    }
}

}  // namespace

MultiIndexSet build_index_set(int s, double eps, int p, int max_cardinality) {
    if (s < 1 || eps <= 0.0 || p < 1) {
        throw std::invalid_argument("build_index_set: require s >= 1, eps > 0, p >= 1");
    }
    std::set<MultiIndex> set;
    MultiIndex stem(s, 0);
    enumerate_profitable(s, eps, p, 0, 1.0, stem, set, max_cardinality);
    set.insert(MultiIndex(s, 0));

    // downward closure
    std::vector<MultiIndex> queue(set.begin(), set.end());
    while (!queue.empty()) {
        const MultiIndex nu = queue.back();
        queue.pop_back();
        for (int i = 0; i < s; ++i) {
            if (nu[i] > 0) {
                MultiIndex lower = nu;
                lower[i] -= 1;
                if (set.insert(lower).second) {
                    if (static_cast<int>(set.size()) > max_cardinality) {
                        throw std::runtime_error(
                            "build_index_set: cardinality cap exceeded");
                    }
                    queue.push_back(lower);
                }
            }
        }
    }

    MultiIndexSet out;
    out.s = s;
    out.indices.assign(set.begin(), set.end());
    return out;
}

SparseGridOp::SparseGridOp(MultiIndexSet index_set, int p)
    : index_set_(std::move(index_set)), p_(p) {
    if (!index_set_.is_downward_closed() || index_set_.size() == 0) {
        throw std::invalid_argument(
            "SparseGridOp: index set must be nonempty and downward-closed");
    }
    const int s = index_set_.s;

    // combination coefficients c_nu = sum_{e in {0,1}^s, nu + e in set} (-1)^|e|,
    // accumulated by scanning the set members inside nu + {0,1}^s
    std::map<std::vector<double>, int> node_ids;
    for (const auto& nu : index_set_.indices) {
        double coeff = 0.0;
        for (const auto& mu : index_set_.indices) {
            int ones = 0;
            bool in_box = true;
            for (int i = 0; i < s; ++i) {
                const int d = mu[i] - nu[i];
                if (d < 0 || d > 1) {
                    in_box = false;
                    break;
                }
                ones += d;
            }
            if (in_box) {
                coeff += (ones % 2 == 0) ? 1.0 : -1.0;
            }
        }

        // enumerate the tensor grid of nu, registering nodes in stable order
        TensorTerm term;
        term.levels = nu;
        term.coeff = coeff;
        term.dims.resize(s);
        std::vector<std::vector<double>> coords(s);
        long total = 1;
        for (int i = 0; i < s; ++i) {
            coords[i] = nodes_1d(nu[i]);
            term.dims[i] = static_cast<int>(coords[i].size());
            total *= term.dims[i];
        }
        term.node_ids.resize(total);
        std::vector<int> tuple(s, 0);
        std::vector<double> point(s);
        for (long flat = 0; flat < total; ++flat) {
            long rem = flat;
            for (int i = s - 1; i >= 0; --i) {
                tuple[i] = static_cast<int>(rem % term.dims[i]);
                rem /= term.dims[i];
            }
            for (int i = 0; i < s; ++i) {
                point[i] = coords[i][tuple[i]];
            }
            auto [it, inserted] =
                node_ids.try_emplace(point, static_cast<int>(nodes_.size()));
            if (inserted) {
                nodes_.emplace_back(
                    Eigen::Map<const Eigen::VectorXd>(point.data(), s));
            }
            term.node_ids[flat] = it->second;
        }
        if (coeff != 0.0) {
            terms_.push_back(std::move(term));
        }
    }
}

int SparseGridOp::num_active_dimensions() const {
    int count = 0;
    for (int i = 0; i < index_set_.s; ++i) {
        for (const auto& nu : index_set_.indices) {
            if (nu[i] > 0) {
                ++count;
                break;
            }
        }
    }
    return count;
}

Eigen::VectorXd SparseGridOp::interpolate(
    const std::vector<Eigen::VectorXd>& node_values,
    const Eigen::VectorXd& y) const {
    if (static_cast<int>(node_values.size()) != num_nodes()) {
        throw std::invalid_argument(
            "SparseGridOp::interpolate: missing samples for the grid nodes");
    }
    if (y.size() != dim()) {
        throw std::invalid_argument(
            "SparseGridOp::interpolate: query dimension mismatch");
    }
    const int s = dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(node_values.front().size());

    std::vector<std::vector<std::pair<int, double>>> w(s);
    for (const auto& term : terms_) {
        for (int i = 0; i < s; ++i) {
            w[i] = interp_weights_1d(term.levels[i], p_, y[i]);
        }
        // accumulate over the cartesian product of the per-dimension stencils
        std::vector<size_t> pick(s, 0);
        while (true) {
            double weight = term.coeff;
            long flat = 0;
            for (int i = 0; i < s; ++i) {
                const auto& [idx, wi] = w[i][pick[i]];
                weight *= wi;
                flat = flat * term.dims[i] + idx;
            }
            out += weight * node_values[term.node_ids[flat]];

            int i = s - 1;
            while (i >= 0 && ++pick[i] == w[i].size()) {
                pick[i] = 0;
                --i;
            }
            if (i < 0) {
                break;
            }
        }
    }
    return out;
}

}  // namespace llgrom
