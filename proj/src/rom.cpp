#include "llgrom/rom.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace llgrom {

std::string variant_name(RomVariant v) {
    switch (v) {
        case RomVariant::OG1x: return "OG-1x";
        case RomVariant::OG3x: return "OG-3x";
        case RomVariant::SSOG1x: return "SS-OG-1x";
        case RomVariant::SSOG3x: return "SS-OG-3x";
    }
    return "?";
}

RomVariant parse_variant(const std::string& name) {
    if (name == "OG-1x") return RomVariant::OG1x;
    if (name == "OG-3x") return RomVariant::OG3x;
    if (name == "SS-OG-1x") return RomVariant::SSOG1x;
    if (name == "SS-OG-3x") return RomVariant::SSOG3x;
    throw std::invalid_argument("unknown ROM variant: " + name);
}

FeVectorField supremizer(const TriMesh& mesh, const GramSet& grams,
                         const FeVectorField& eta, const FeScalarField& zeta) {
    const SpMat b = assemble_constraint(mesh, eta);
    const CholeskyFactor q_factor(grams.q_vec);
    const Eigen::VectorXd rhs = b.transpose() * zeta.coeffs;
    const Eigen::VectorXd t = q_factor.solve(rhs);
    const double rel =
        (grams.q_vec * t - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (rel > 1e-10) {
        throw std::runtime_error("supremizer: solve residual too large");
    }
    return FeVectorField(t);
}

RomSpaces build_rom_spaces(const TriMesh& mesh, const GramSet& grams,
                           const ReducedBasis& v_basis,
                           const ReducedBasis& lambda_basis,
                           const ReducedBasis& m_basis, RomVariant variant,
                           int budget) {
    if (budget < 1) {
        throw std::invalid_argument("build_rom_spaces: budget must be >= 1");
    }
    int j = 0, r = 0;
    switch (variant) {
        case RomVariant::OG1x:
        case RomVariant::SSOG1x:
            j = budget;
            r = budget;
            break;
        case RomVariant::OG3x:
        case RomVariant::SSOG3x:
            r = budget / 3;
            j = 3 * r;
            break;
    }
    if (j < 1 || r < 1) {
        throw std::invalid_argument(
            "build_rom_spaces: budget too small for variant " +
            variant_name(variant));
    }
    if (j > v_basis.dimension() || r > lambda_basis.dimension()) {
        throw std::invalid_argument(
            "build_rom_spaces: requested dimensions exceed basis rank");
    }

    RomSpaces spaces;
    spaces.variant = variant;
    spaces.plain_dim = j;
    spaces.phi_v = v_basis.phi.leftCols(j);
    spaces.phi_lambda = lambda_basis.phi.leftCols(r);
    spaces.m_basis = m_basis;

    const bool stab =
        variant == RomVariant::SSOG1x || variant == RomVariant::SSOG3x;
    if (!stab) {
        return spaces;
    }

    int k_enrich = 0, r_enrich = 0;
    if (variant == RomVariant::SSOG1x) {
        k_enrich = static_cast<int>(std::floor(std::sqrt(double(j))));
        r_enrich = k_enrich;
    } else {
        k_enrich = static_cast<int>(std::floor(std::sqrt(double(j)) / 3.0));
        r_enrich = 3 * k_enrich;
    }
    k_enrich = std::min(k_enrich, m_basis.dimension());
    r_enrich = std::min(r_enrich, r);
    if (k_enrich < 1 || r_enrich < 1) {
        spaces.stabilized = true;  // enrichment empty at this size
        return spaces;
    }

    const CholeskyFactor q_factor(grams.q_vec);
    Eigen::MatrixXd sups(spaces.phi_v.rows(),
                         static_cast<Eigen::Index>(k_enrich) * r_enrich);
    Eigen::Index col = 0;
    for (int k = 0; k < k_enrich; ++k) {
        const SpMat b_k =
            assemble_constraint(mesh, FeVectorField(m_basis.phi.col(k)));
        for (int rr = 0; rr < r_enrich; ++rr) {
            sups.col(col++) =
                q_factor.solve(b_k.transpose() * spaces.phi_lambda.col(rr));
        }
    }
    spaces.supremizers = sups;
    spaces.phi_v = orthonormalize_q(grams.q_vec, spaces.phi_v, sups, 1e-10);
    spaces.stabilized = true;
    return spaces;
}

namespace {

double min_singular_value(const Eigen::MatrixXd& b_tilde) {
    if (b_tilde.rows() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    if (b_tilde.rows() > b_tilde.cols()) {
        return 0.0;  // multiplier space larger than the velocity space
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b_tilde);
    return svd.singularValues().minCoeff();
}

}  // namespace

double rom_infsup(const RomSpaces& spaces, const FeVectorField& m_hat_full,
                  const TriMesh& mesh, const GramSet& grams) {
    (void)grams;
    if (spaces.lambda_dim() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const SpMat b = assemble_constraint(mesh, m_hat_full);
    const Eigen::MatrixXd b_tilde =
        spaces.phi_lambda.transpose() * (b * spaces.phi_v);
    return min_singular_value(b_tilde);
}

RomTrajectory rom_run(const TriMesh& mesh, const GramSet& grams,
                      const NoiseModel& noise, const RomSpaces& spaces,
                      const PointFunction& m0, const ParamVector& y,
                      const TpsConfig& cfg, RomInit init) {
    cfg.validate();
    const int n_steps = cfg.num_steps();
    const int jp = spaces.velocity_dim();
    const int r = spaces.lambda_dim();
    const BrownianPath path{y, cfg.T};

    RomTrajectory traj;
    traj.reduced_coeffs.reserve(n_steps + 1);
    traj.full_magnetizations.reserve(n_steps + 1);
    traj.infsup.reserve(n_steps);

    const FeVectorField m0_h = l2_project(mesh, grams, m0);
    Eigen::VectorXd base0;
    if (init == RomInit::MagnetizationBasis &&
        spaces.m_basis.dimension() > 0) {
        const Eigen::VectorXd cm =
            spaces.m_basis.phi.transpose() * (grams.q_vec * m0_h.coeffs);
        base0 = spaces.m_basis.phi * cm;
    } else {
        base0 = spaces.phi_v *
                (spaces.phi_v.transpose() * (grams.q_vec * m0_h.coeffs));
    }
    FeVectorField m_hat = normalize_nodewise(FeVectorField(base0));
    traj.reduced_coeffs.push_back(spaces.phi_v.transpose() *
                                  (grams.q_vec * m_hat.coeffs));
    traj.full_magnetizations.push_back(m_hat);

    for (int step = 0; step < n_steps; ++step) {
        const double t = step * cfg.tau;
        const double w_val = brownian_eval(path, t);

        const SpMat a =
            assemble_system_matrix(mesh, grams, m_hat, cfg.alpha, cfg.tau);
        const SpMat b = assemble_constraint(mesh, m_hat);
        const Eigen::VectorXd f =
            assemble_load(mesh, grams, noise, m_hat, w_val, t);

        const Eigen::MatrixXd a_tilde =
            spaces.phi_v.transpose() * (a * spaces.phi_v);
        const Eigen::MatrixXd b_tilde =
            spaces.phi_lambda.transpose() * (b * spaces.phi_v);
        const Eigen::VectorXd f_tilde = spaces.phi_v.transpose() * f;

        traj.infsup.push_back(min_singular_value(b_tilde));

        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(jp + r, jp + r);
        sys.topLeftCorner(jp, jp) = a_tilde;
        sys.topRightCorner(jp, r) = b_tilde.transpose();
        sys.bottomLeftCorner(r, jp) = b_tilde;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(jp + r);
        rhs.head(jp) = f_tilde;

        // ill-conditioned systems are solved as-is (OG-1x lives off them);
        // only an exact breakdown is an error
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        const Eigen::VectorXd sol = lu.solve(rhs);
        if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0 ||
            !sol.allFinite()) {
            throw std::runtime_error(
                "rom_run: reduced saddle system singular at step " +
                std::to_string(step) + " (variant " +
                variant_name(spaces.variant) + ")");
        }
        const Eigen::VectorXd v_tilde = sol.head(jp);

        // normalized state advanced by the reduced velocity increment; with
        // full reduced spaces this is the high-fidelity update verbatim
        const FeVectorField next(m_hat.coeffs +
                                 cfg.tau * (spaces.phi_v * v_tilde));
        m_hat = normalize_nodewise(next);
        traj.reduced_coeffs.push_back(spaces.phi_v.transpose() *
                                      (grams.q_vec * next.coeffs));
        traj.full_magnetizations.push_back(m_hat);
    }
    return traj;
}

}  // namespace llgrom
