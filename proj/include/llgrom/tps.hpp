#ifndef LLGROM_TPS_HPP
#define LLGROM_TPS_HPP

#include <optional>
#include <vector>

#include "llgrom/brownian.hpp"
#include "llgrom/field_ops.hpp"

namespace llgrom {

struct TpsConfig {
    double alpha = 1.4;
    double T = 0.5;
    double tau = 1e-3;
    bool normalize = true;

    // Number of time steps; T/tau must be integral to 1e-9.
    int num_steps() const;
    void validate() const;
};

// Discrete trajectory of one tangent plane run. `magnetizations` holds the
// states used to assemble each step (normalized when cfg.normalize is set),
// n = 0..N_T; velocities and multipliers hold the N_T per-step solutions.
struct Trajectory {
    std::vector<FeVectorField> magnetizations;
    std::vector<FeVectorField> velocities;
    std::vector<FeScalarField> multipliers;
    std::vector<double> infsup;  // empty unless requested
};

// One saddle-point solve: [A B^T; B 0] (v, lambda) = (f, 0) with
// A = assemble_system_matrix(m_hat), B = assemble_constraint(m_hat),
// f = assemble_load(m_hat, W(t)). Relative residual <= 1e-9 enforced.
std::pair<FeVectorField, FeScalarField> tps_step(
    const TriMesh& mesh, const GramSet& grams, const NoiseModel& noise,
    const FeVectorField& m_hat, double w_val, double t, const TpsConfig& cfg);

Trajectory tps_run(const TriMesh& mesh, const GramSet& grams,
                   const NoiseModel& noise, const PointFunction& m0,
                   const ParamVector& y, const TpsConfig& cfg,
                   bool record_infsup = false);

// Smallest generalized singular value of the constraint in the
// (H^1 primal, L^2 dual) pairing:
//   beta = min_lambda sqrt( (lambda^T B Q^{-1} B^T lambda) / (lambda^T M lambda) ).
// Solved densely for N_h <= dense_limit, otherwise by inverse iteration on
// the Schur complement.
double infsup_constant(const TriMesh& mesh, const GramSet& grams,
                       const FeVectorField& m_hat, int dense_limit = 2000);

}  // namespace llgrom

#endif
