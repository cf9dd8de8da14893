#ifndef LLGROM_ROM_HPP
#define LLGROM_ROM_HPP

#include <string>
#include <vector>

#include "llgrom/pod.hpp"

namespace llgrom {

enum class RomVariant { OG1x, OG3x, SSOG1x, SSOG3x };

std::string variant_name(RomVariant v);
RomVariant parse_variant(const std::string& name);

// Online space pair: Q-orthonormal velocity block (possibly enriched with
// supremizers) and L^2-orthonormal multiplier block. The magnetization basis
// is kept for the supremizer construction and the initial-projection switch.
struct RomSpaces {
    Eigen::MatrixXd phi_v;       // N_dof x J'
    Eigen::MatrixXd phi_lambda;  // N_h x R
    ReducedBasis m_basis;
    RomVariant variant = RomVariant::OG1x;
    bool stabilized = false;
    int plain_dim = 0;                // J before enrichment
    Eigen::MatrixXd supremizers;      // raw enrichment columns (may be empty)

    int velocity_dim() const { return static_cast<int>(phi_v.cols()); }
    int lambda_dim() const { return static_cast<int>(phi_lambda.cols()); }
};

// Riesz representer of the constraint form: solves
//   <T_eta zeta, v>_{H^1} = <zeta, v . eta>_{L^2}  for all v,
// i.e. q_vec t = B(eta)^T zeta.
FeVectorField supremizer(const TriMesh& mesh, const GramSet& grams,
                         const FeVectorField& eta, const FeScalarField& zeta);

// Sizing rules: OG-1x takes J = R = budget; OG-3x takes R = budget / 3 and
// J = 3R. The SS variants append supremizers T_{eta_k} zeta_r for the leading
// K magnetization and R_e multiplier modes, (K, R_e) = (floor(sqrt(J)),
// floor(sqrt(J))) for SS-OG-1x and (floor(sqrt(J)/3), 3K) for SS-OG-3x, then
// re-orthonormalize the velocity block in Q, dropping dependent columns.
RomSpaces build_rom_spaces(const TriMesh& mesh, const GramSet& grams,
                           const ReducedBasis& v_basis,
                           const ReducedBasis& lambda_basis,
                           const ReducedBasis& m_basis, RomVariant variant,
                           int budget);

struct RomTrajectory {
    std::vector<Eigen::VectorXd> reduced_coeffs;     // N_T + 1 entries
    std::vector<FeVectorField> full_magnetizations;  // N_T + 1, normalized
    std::vector<double> infsup;                      // N_T entries
};

// Which reduced space receives the initial magnetization projection. The
// velocity POD space barely represents magnetization states, so the
// magnetization basis is the default whenever one is attached to the spaces.
enum class RomInit { MagnetizationBasis, VelocityBasis };

// Galerkin POD-TPS online phase. Per step the full-space operators are
// assembled at the current normalized state and projected onto the reduced
// pair; the velocity solve happens in the reduced saddle system, and the
// magnetization update m^{n+1} = m_hat^n + tau Phi_v v_tilde advances the
// normalized state with the reduced velocity increment. With full reduced
// spaces this reproduces the high-fidelity scheme step for step.
RomTrajectory rom_run(const TriMesh& mesh, const GramSet& grams,
                      const NoiseModel& noise, const RomSpaces& spaces,
                      const PointFunction& m0, const ParamVector& y,
                      const TpsConfig& cfg,
                      RomInit init = RomInit::MagnetizationBasis);

// Smallest singular value of the projected constraint block at the given
// full-space state; +infinity for an empty multiplier space.
double rom_infsup(const RomSpaces& spaces, const FeVectorField& m_hat_full,
                  const TriMesh& mesh, const GramSet& grams);

}  // namespace llgrom

#endif
