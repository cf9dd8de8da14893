#include "llgrom/tps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

namespace llgrom {

int TpsConfig::num_steps() const {
    return static_cast<int>(std::llround(T / tau));
}

void TpsConfig::validate() const {
    if (alpha <= 0.0 || tau <= 0.0 || T < tau) {
        throw std::invalid_argument(
            "TpsConfig: require alpha > 0, tau > 0, T >= tau");
    }
    const double steps = T / tau;
    if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps)) {
        throw std::invalid_argument("TpsConfig: T/tau is not an integer");
    }
}

namespace {

SpMat assemble_saddle(const SpMat& a, const SpMat& b) {
    const int nv = static_cast<int>(a.rows());
    const int nl = static_cast<int>(b.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.nonZeros() + 2 * b.nonZeros());
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SpMat::InnerIterator it(a, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()),
                               static_cast<int>(it.col()), it.value());
        }
    }
    for (int k = 0; k < b.outerSize(); ++k) {
        for (SpMat::InnerIterator it(b, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            trips.emplace_back(nv + i, j, it.value());
            trips.emplace_back(j, nv + i, it.value());
        }
    }
    SpMat sys(nv + nl, nv + nl);
    sys.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

}  // namespace

std::pair<FeVectorField, FeScalarField> tps_step(
    const TriMesh& mesh, const GramSet& grams, const NoiseModel& noise,
    const FeVectorField& m_hat, double w_val, double t, const TpsConfig& cfg) {
    const int n = mesh.num_nodes();
    for (int k = 0; k < n; ++k) {
        if (m_hat.at_node(k).norm() == 0.0) {
            throw std::invalid_argument("tps_step: m_hat vanishes at node " +
                                        std::to_string(k));
        }
    }
    const SpMat a =
        assemble_system_matrix(mesh, grams, m_hat, cfg.alpha, cfg.tau);
    const SpMat b = assemble_constraint(mesh, m_hat);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * n);
    rhs.head(3 * n) = assemble_load(mesh, grams, noise, m_hat, w_val, t);

    const SpMat sys = assemble_saddle(a, b);
    Eigen::SparseLU<SpMat> lu;
    lu.compute(sys);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error(
            "tps_step: saddle factorization failed (matrix singular?)");
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    const double rel =
        (sys * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (!std::isfinite(rel) || rel > 1e-9) {
        throw std::runtime_error(
            "tps_step: saddle solve residual " + std::to_string(rel) +
            " exceeds tolerance (system ill-conditioned)");
    }
    return {FeVectorField(sol.head(3 * n)), FeScalarField(sol.tail(n))};
}

Trajectory tps_run(const TriMesh& mesh, const GramSet& grams,
                   const NoiseModel& noise, const PointFunction& m0,
                   const ParamVector& y, const TpsConfig& cfg,
                   bool record_infsup) {
    cfg.validate();
    const int n_steps = cfg.num_steps();
    const BrownianPath path{y, cfg.T};

    Trajectory traj;
    traj.magnetizations.reserve(n_steps + 1);
    traj.velocities.reserve(n_steps);
    traj.multipliers.reserve(n_steps);

    const FeVectorField m0_proj = l2_project(mesh, grams, m0);
    FeVectorField state =
        cfg.normalize ? normalize_nodewise(m0_proj) : m0_proj;
    traj.magnetizations.push_back(state);

    for (int step = 0; step < n_steps; ++step) {
        const double t = step * cfg.tau;
        const double w_val = brownian_eval(path, t);
        try {
            auto [v, lambda] = tps_step(mesh, grams, noise, state, w_val, t, cfg);
            if (record_infsup) {
                traj.infsup.push_back(infsup_constant(mesh, grams, state));
            }
            FeVectorField next(state.coeffs + cfg.tau * v.coeffs);
            if (cfg.normalize) {
                next = normalize_nodewise(next);
            }
            traj.velocities.push_back(std::move(v));
            traj.multipliers.push_back(std::move(lambda));
            traj.magnetizations.push_back(next);
            state = traj.magnetizations.back();
        } catch (const std::exception& e) {
            throw std::runtime_error("tps_run: step " + std::to_string(step) +
                                     ": " + e.what());
        }
    }
    return traj;
}

namespace {

// Conjugate gradients for S z = rhs with S = B Q^{-1} B^T applied matrix-free.
Eigen::VectorXd schur_cg(const SpMat& b, const CholeskyFactor& q_factor,
                         const Eigen::VectorXd& rhs, double tol, int max_it) {
    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return b * q_factor.solve(b.transpose() * x);
    };
    Eigen::VectorXd z = Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    const double stop = tol * tol * rhs.squaredNorm();
    for (int it = 0; it < max_it && rr > stop; ++it) {
        const Eigen::VectorXd sp = apply(p);
        const double alpha = rr / p.dot(sp);
        z += alpha * p;
        r -= alpha * sp;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return z;
}

}  // namespace

double infsup_constant(const TriMesh& mesh, const GramSet& grams,
                       const FeVectorField& m_hat, int dense_limit) {
    const int n = mesh.num_nodes();
    const SpMat b = assemble_constraint(mesh, m_hat);
    if (b.norm() == 0.0) {
        return 0.0;
    }
    const CholeskyFactor q_factor(grams.q_vec);

    if (n <= dense_limit) {
        const Eigen::MatrixXd bt = Eigen::MatrixXd(b.transpose());
        const Eigen::MatrixXd schur = b * q_factor.solve(bt);
        const Eigen::MatrixXd mass = Eigen::MatrixXd(grams.mass_scalar);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur,
                                                                     mass);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error(
                "infsup_constant: generalized eigensolve failed");
        }
        return std::sqrt(std::max(0.0, es.eigenvalues()[0]));
    }

    // inverse iteration on S x = mu M x for the smallest mu
    const SpMat& mass = grams.mass_scalar;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    x /= std::sqrt(x.dot(mass * x));
    double mu = 0.0;
    double mu_prev = -1.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd z = schur_cg(b, q_factor, mass * x, 1e-12, 10 * n);
        const double nrm = std::sqrt(z.dot(mass * z));
        if (!(nrm > 0.0) || !std::isfinite(nrm)) {
            throw std::runtime_error(
                "infsup_constant: inverse iteration broke down");
        }
        x = z / nrm;
        const Eigen::VectorXd sx = b * q_factor.solve(b.transpose() * x);
        mu = x.dot(sx) / x.dot(mass * x);
        if (std::abs(mu - mu_prev) <= 1e-10 * std::max(1.0, std::abs(mu))) {
            return std::sqrt(std::max(0.0, mu));
        }
        mu_prev = mu;
    }
    throw std::runtime_error("infsup_constant: inverse iteration did not converge");
}

}  // namespace llgrom
