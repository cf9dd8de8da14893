#include "llgrom/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "llgrom/quadrature.hpp"

namespace llgrom {

PhysicalDiagnostics physical_diagnostics(const FeVectorField& m,
                                         const TriMesh& mesh,
                                         const GramSet& grams) {
    PhysicalDiagnostics out;
    const auto& rule = tri_quadrature();
    double ume = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        for (const auto& qp : rule) {
            const double lam[3] = {qp.l0, qp.l1, qp.l2};
            Eigen::Vector3d mx = Eigen::Vector3d::Zero();
            for (int k = 0; k < 3; ++k) {
                mx += lam[k] * m.at_node(tri[k]);
            }
            ume += area * qp.w * std::abs(1.0 - mx.squaredNorm());
        }
    }
    out.unit_modulus_err = ume;
    out.dirichlet_energy =
        std::sqrt(std::max(0.0, m.coeffs.dot(grams.stiff_vec * m.coeffs)));
    const int n = m.n_nodes();
    out.avg_mz = (grams.mass_scalar * m.component(2))
                     .dot(Eigen::VectorXd::Ones(n));
    return out;
}

double h1_norm(const Eigen::VectorXd& w, const GramSet& grams) {
    return std::sqrt(std::max(0.0, w.dot(grams.q_vec * w)));
}

double galerkin_pod_error(const std::vector<Trajectory>& hf,
                          const std::vector<RomTrajectory>& rom,
                          const GramSet& grams) {
    if (hf.empty() || hf.size() != rom.size()) {
        throw std::invalid_argument("galerkin_pod_error: sample count mismatch");
    }
    const size_t n_steps = hf.front().velocities.size();
    double acc = 0.0;
    for (size_t m = 0; m < hf.size(); ++m) {
        if (rom[m].full_magnetizations.size() != n_steps + 1 ||
            hf[m].magnetizations.size() != n_steps + 1) {
            throw std::invalid_argument("galerkin_pod_error: time grid mismatch");
        }
        for (size_t n = 1; n <= n_steps; ++n) {
            const Eigen::VectorXd diff = hf[m].magnetizations[n].coeffs -
                                         rom[m].full_magnetizations[n].coeffs;
            acc += diff.dot(grams.q_vec * diff);
        }
    }
    return std::sqrt(acc / (static_cast<double>(hf.size()) *
                            static_cast<double>(n_steps)));
}

double rms_h1_error(
    const std::vector<std::vector<FeVectorField>>& reference,
    const std::vector<std::vector<FeVectorField>>& approximation,
    const GramSet& grams, int reference_stride) {
    if (reference.empty() || reference.size() != approximation.size()) {
        throw std::invalid_argument("rms_h1_error: sample count mismatch");
    }
    const size_t n_steps = approximation.front().size() - 1;
    double acc = 0.0;
    for (size_t m = 0; m < reference.size(); ++m) {
        if ((approximation[m].size() - 1) * reference_stride !=
            reference[m].size() - 1) {
            throw std::invalid_argument("rms_h1_error: time grid mismatch");
        }
        for (size_t n = 1; n <= n_steps; ++n) {
            const Eigen::VectorXd diff =
                reference[m][n * reference_stride].coeffs -
                approximation[m][n].coeffs;
            acc += diff.dot(grams.q_vec * diff);
        }
    }
    return std::sqrt(acc / (static_cast<double>(reference.size()) *
                            static_cast<double>(n_steps)));
}

FeVectorField prolongate(const TriMesh& coarse, const TriMesh& fine,
                         const FeVectorField& w) {
    if (fine.n_div % coarse.n_div != 0) {
        throw std::invalid_argument("prolongate: meshes are not nested");
    }
    FeVectorField out = FeVectorField::zero(fine.num_nodes());
    for (int k = 0; k < fine.num_nodes(); ++k) {
        const Eigen::Vector2d x = fine.nodes[k];
        const int t = locate_triangle(coarse, x);
        const auto& tri = coarse.triangles[t];
        const Eigen::Vector2d p0 = coarse.nodes[tri[0]];
        const Eigen::Vector2d p1 = coarse.nodes[tri[1]];
        const Eigen::Vector2d p2 = coarse.nodes[tri[2]];
        Eigen::Matrix2d a;
        a.col(0) = p1 - p0;
        a.col(1) = p2 - p0;
        const Eigen::Vector2d lam12 = a.inverse() * (x - p0);
        const double lam[3] = {1.0 - lam12[0] - lam12[1], lam12[0], lam12[1]};
        Eigen::Vector3d val = Eigen::Vector3d::Zero();
        for (int a3 = 0; a3 < 3; ++a3) {
            val += lam[a3] * w.at_node(tri[a3]);
        }
        out.set_node(k, val);
    }
    return out;
}

double rate_fit(const std::vector<double>& xs, const std::vector<double>& errs) {
    if (xs.size() != errs.size() || xs.size() < 2) {
        throw std::invalid_argument("rate_fit: need at least two points");
    }
    const int n = static_cast<int>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        if (xs[i] <= 0.0 || errs[i] <= 0.0) {
            throw std::invalid_argument("rate_fit: inputs must be positive");
        }
        const double lx = std::log(xs[i]);
        const double ly = std::log(errs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<int> histogram(const std::vector<double>& values, double lo,
                           double hi, int nbins) {
    if (nbins < 1 || hi <= lo) {
        throw std::invalid_argument("histogram: invalid bins");
    }
    std::vector<int> counts(nbins, 0);
    for (double v : values) {
        int bin = static_cast<int>(std::floor((v - lo) / (hi - lo) * nbins));
        bin = std::clamp(bin, 0, nbins - 1);
        counts[bin] += 1;
    }
    return counts;
}

}  // namespace llgrom
