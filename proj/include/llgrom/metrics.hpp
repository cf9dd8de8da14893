#ifndef LLGROM_METRICS_HPP
#define LLGROM_METRICS_HPP

#include <vector>

#include "llgrom/rom.hpp"

namespace llgrom {

struct PhysicalDiagnostics {
    double unit_modulus_err = 0.0;  // integral of |1 - |m|^2|
    double dirichlet_energy = 0.0;  // sqrt of m^T stiff_vec m
    double avg_mz = 0.0;            // integral of m_z
};

PhysicalDiagnostics physical_diagnostics(const FeVectorField& m,
                                         const TriMesh& mesh,
                                         const GramSet& grams);

double h1_norm(const Eigen::VectorXd& w, const GramSet& grams);

// RMS H^1 distance between two magnetization sequences over samples and
// steps n = 1..N_T (matching time grids required).
double galerkin_pod_error(const std::vector<Trajectory>& hf,
                          const std::vector<RomTrajectory>& rom,
                          const GramSet& grams);

// Same reduction for sequences of plain fields (one sequence per sample);
// `stride` subsamples the reference in time when it was computed with a
// finer step.
double rms_h1_error(
    const std::vector<std::vector<FeVectorField>>& reference,
    const std::vector<std::vector<FeVectorField>>& approximation,
    const GramSet& grams, int reference_stride = 1);

// Exact P1 prolongation between nested structured meshes (fine n_div an
// integer multiple of the coarse one): evaluates the coarse field at the
// fine nodes.
FeVectorField prolongate(const TriMesh& coarse, const TriMesh& fine,
                         const FeVectorField& w);

// Least-squares slope of log(err) against log(x).
double rate_fit(const std::vector<double>& xs, const std::vector<double>& errs);

// Fixed-bin histogram counts over [lo, hi); values outside are clamped to
// the boundary bins.
std::vector<int> histogram(const std::vector<double>& values, double lo,
                           double hi, int nbins);

}  // namespace llgrom

#endif
