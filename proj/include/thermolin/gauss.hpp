// gauss.hpp — Exact law of the process: matrix-exponential propagation,
// Lyapunov covariance (direct and closed form), time-dependent covariance,
// mean energy, the stationary Gaussian state, and the alpha = 0 growth
// formulas.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "thermolin/model.hpp"
#include "thermolin/structure.hpp"

namespace thermolin {

// The spectral abscissa must clear -kHurwitzTol * ||A||_F for a Lyapunov
// solve; at the boundary uniqueness fails.
inline constexpr double kHurwitzTol = 1e-10;

class NotHurwitzError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ------------------------------ Spectral helpers ------------------------------

inline double spectral_abscissa(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Time horizon after which transients are below the 1e-8 tolerance budget.
inline double settling_time(const Eigen::MatrixXd& a_hurwitz, double decades = 20.0) {
    const double abscissa = spectral_abscissa(a_hurwitz);
    if (abscissa >= 0.0) {
        throw NotHurwitzError("settling_time: matrix is not Hurwitz");
    }
    return decades / std::abs(abscissa);
}

// ------------------------------ Matrix exponential ----------------------------

// e^{tA} by scaling-and-squaring Pade approximation (degree and scale chosen
// by norm).
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t = 1.0) {
    if (!a.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("expm: non-finite input");
    }
    Eigen::MatrixXd scaled = t * a;
    Eigen::MatrixXd result = scaled.exp();
    if (!result.allFinite()) {
        std::ostringstream msg;
        msg << "expm: overflow, ||tA||_inf = " << scaled.cwiseAbs().rowwise().sum().maxCoeff();
        throw std::overflow_error(msg.str());
    }
    return result;
}

// ------------------------------ Lyapunov solvers ------------------------------

struct LyapunovSolution {
    Eigen::MatrixXd u;  // symmetric positive definite
    double residual;    // ||A U + U A^T + g g^T||_F at construction
};

inline double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& u,
                                const Eigen::VectorXd& g) {
    return (a * u + u * a.transpose() + g * g.transpose()).norm();
}

inline void require_hurwitz(const Eigen::MatrixXd& a, const char* who) {
    const double abscissa = spectral_abscissa(a);
    if (abscissa > -kHurwitzTol * std::max(a.norm(), 1e-300)) {
        std::ostringstream msg;
        msg << who << ": spectrum not strictly in the left half-plane "
            << "(abscissa = " << abscissa << "); the Lyapunov solution is not unique. "
            << "This is the alpha = 0 / nontrivial-L0 obstruction.";
        throw NotHurwitzError(msg.str());
    }
}

// Dense solve of A U + U A^T = -g g^T by Kronecker vectorization.
inline LyapunovSolution solve_lyapunov_direct(const Eigen::MatrixXd& a,
                                              const Eigen::VectorXd& g) {
    const Eigen::Index m = a.rows();
    if (a.cols() != m || g.size() != m) {
        throw std::invalid_argument("solve_lyapunov_direct: dimension mismatch");
    }
    require_hurwitz(a, "solve_lyapunov_direct");

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd kron = Eigen::kroneckerProduct(eye, a).eval();
    kron += Eigen::kroneckerProduct(a, eye);
    const Eigen::MatrixXd rhs_mat = -(g * g.transpose());
    const Eigen::Map<const Eigen::VectorXd> rhs(rhs_mat.data(), m * m);
    Eigen::VectorXd solution = Eigen::PartialPivLU<Eigen::MatrixXd>(kron).solve(rhs);
    Eigen::MatrixXd u = Eigen::Map<Eigen::MatrixXd>(solution.data(), m, m);
    u = 0.5 * (u + u.transpose().eval());
    return LyapunovSolution{u, lyapunov_residual(a, u, g)};
}

// Closed form for the drift (0, E; -V, -alpha Delta_1..n): U = diag(V^{-1}, E) / (2 alpha).
// Valid on the full space when L0 = {0}, and always on the restricted system
// with V' in place of V.
inline LyapunovSolution closed_form_u(const Eigen::MatrixXd& v, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("closed_form_u: alpha must be > 0");
    }
    const Eigen::Index n = v.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("closed_form_u: V must be positive definite");
    }
    Eigen::MatrixXd v_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    v_inv = 0.5 * (v_inv + v_inv.transpose().eval());
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    u.topLeftCorner(n, n) = v_inv / (2.0 * alpha);
    u.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) / (2.0 * alpha);
    return LyapunovSolution{u, std::numeric_limits<double>::quiet_NaN()};
}

inline LyapunovSolution closed_form_u(const Hamiltonian& h, double alpha) {
    return closed_form_u(h.coupling(), alpha);
}

inline LyapunovSolution closed_form_u(const RestrictedSystem& restricted, double alpha) {
    LyapunovSolution sol = closed_form_u(restricted.v_prime, alpha);
    sol.residual = lyapunov_residual(restricted.a_prime, sol.u, restricted.g_prime);
    return sol;
}

// ------------------------------- Gaussian states -------------------------------

struct GaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double time;
};

// C(t) = sigma^2 (U - e^{tA'} U e^{tA'^T}) on the restricted coordinates.
inline GaussianState covariance_at(const SystemSpec& spec, const RestrictedSystem& restricted,
                                   double t) {
    if (t < 0.0) {
        throw std::invalid_argument("covariance_at: t must be >= 0");
    }
    require_hurwitz(restricted.a_prime, "covariance_at");
    const Eigen::MatrixXd u = closed_form_u(restricted.v_prime, spec.alpha).u;
    const Eigen::MatrixXd propagator = expm(restricted.a_prime, t);
    Eigen::MatrixXd c =
        spec.sigma * spec.sigma * (u - propagator * u * propagator.transpose());
    c = 0.5 * (c + c.transpose().eval());
    const int dim = restricted.dim();
    return GaussianState{Eigen::VectorXd::Zero(2 * dim), std::move(c), t};
}

inline PhaseVector mean_at(const SystemSpec& spec, const PhaseVector& psi0, double t) {
    if (psi0.sites() != spec.sites()) {
        throw std::invalid_argument("mean_at: dimension mismatch");
    }
    const DriftMatrix drift = build_drift(spec);
    return PhaseVector::from_stacked(expm(drift.a, t) * psi0.stacked());
}

// The limiting law on L-: zero mean, covariance sigma^2 U.
inline GaussianState stationary_state(const SystemSpec& spec,
                                      const RestrictedSystem& restricted) {
    if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("stationary_state: alpha must be > 0");
    }
    const Eigen::MatrixXd u = closed_form_u(restricted.v_prime, spec.alpha).u;
    const int dim = restricted.dim();
    return GaussianState{Eigen::VectorXd::Zero(2 * dim), spec.sigma * spec.sigma * u,
                         std::numeric_limits<double>::infinity()};
}

// log p(psi') of the limiting law: -(2 alpha / sigma^2) H'(psi') - log Z, with
// Z the Gaussian normalizer of covariance sigma^2 U'.
inline double gibbs_log_density(const SystemSpec& spec, const RestrictedSystem& restricted,
                                const Eigen::VectorXd& psi_prime) {
    if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("gibbs_log_density: alpha must be > 0");
    }
    const int d = restricted.dim();
    if (psi_prime.size() != 2 * d) {
        throw std::invalid_argument("gibbs_log_density: dimension mismatch");
    }
    // log det(sigma^2 U') with U' = diag(V'^{-1}, E) / (2 alpha):
    //   2d log(sigma^2 / (2 alpha)) - log det V'.
    Eigen::LLT<Eigen::MatrixXd> llt(restricted.v_prime);
    double log_det_v = 0.0;
    for (int i = 0; i < d; ++i) {
        log_det_v += 2.0 * std::log(llt.matrixL()(i, i));
    }
    const double log_det_cov =
        2.0 * d * std::log(spec.sigma * spec.sigma / (2.0 * spec.alpha)) - log_det_v;
    const double log_z = d * std::log(2.0 * M_PI) + 0.5 * log_det_cov;
    return -(2.0 * spec.alpha / (spec.sigma * spec.sigma)) * restricted.energy(psi_prime) -
           log_z;
}

// -------------------------------- Mean energy ---------------------------------

// sigma^2 / (4 alpha) * dim L-, the limit of the stochastic part's energy.
inline double limit_mean_energy(const SystemSpec& spec, const RestrictedSystem& restricted) {
    if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("limit_mean_energy: alpha must be > 0");
    }
    return spec.sigma * spec.sigma / (4.0 * spec.alpha) *
           restricted.decomposition.dim_minus();
}

// E H(psi(t)) = H(conserved L0 part) + H'(mean'(t)) + tr(Q' C(t)) / 2.
inline double mean_energy_at(const SystemSpec& spec, const RestrictedSystem& restricted,
                             const PhaseVector& psi0, double t) {
    const auto [psi_zero, psi_minus] = decompose_state(psi0, restricted.decomposition);
    const double conserved = energy(spec.hamiltonian, psi_zero);

    const Eigen::VectorXd psi_prime0 = restricted.restricted_coordinates(psi_minus);
    const Eigen::VectorXd mean_prime = expm(restricted.a_prime, t) * psi_prime0;
    const double transient = restricted.energy(mean_prime);

    const GaussianState law = covariance_at(spec, restricted, t);
    const double stochastic = 0.5 * (restricted.energy_form() * law.covariance).trace();
    return conserved + transient + stochastic;
}

// ------------------------------ alpha = 0 growth -------------------------------

namespace detail {

// sin(x t) / x, stable near x = 0.
inline double sin_t_over(double x, double t) {
    const double xt = x * t;
    if (std::abs(xt) < 1e-8) {
        return t * (1.0 - xt * xt / 6.0);
    }
    return std::sin(xt) / x;
}

// (1 - cos(x t)) / x = 2 sin^2(x t / 2) / x, stable near x = 0.
inline double one_minus_cos_over(double x, double t) {
    const double xt = x * t;
    if (std::abs(xt) < 1e-8) {
        return 0.5 * x * t * t;
    }
    const double s = std::sin(0.5 * xt);
    return 2.0 * s * s / x;
}

}  // namespace detail

struct EnergyGrowth {
    double kinetic;    // E T
    double potential;  // E U
    double total;      // E H = E T + E U = sigma^2 t / 2
};

// Mean energy of the zero-initial-condition solution at alpha = 0, via the
// spectral decomposition of V: the integrals of cos^2 / sin^2 of sqrt(V)
// evaluate analytically mode by mode.
inline EnergyGrowth energy_growth_alpha0(const SystemSpec& spec, double t) {
    if (spec.alpha != 0.0) {
        throw std::invalid_argument("energy_growth_alpha0: requires alpha = 0");
    }
    if (t < 0.0) {
        throw std::invalid_argument("energy_growth_alpha0: t must be >= 0");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.hamiltonian.coupling());
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("energy_growth_alpha0: eigendecomposition failed");
    }
    const Eigen::VectorXd lambda = es.eigenvalues();
    const Eigen::VectorXd weights =
        es.eigenvectors().row(spec.noise_index0()).transpose().cwiseAbs2();

    const double half_sigma2 = 0.5 * spec.sigma * spec.sigma;
    double kinetic = 0.0;
    double potential = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double omega = std::sqrt(lambda(i));
        // int_0^t cos^2(w u) du = t/2 + sin(2 w t) / (4 w); sin^2 is the complement.
        const double cos2 = 0.5 * t + 0.5 * detail::sin_t_over(2.0 * omega, t);
        const double sin2 = t - cos2;
        kinetic += weights(i) * half_sigma2 * cos2;
        potential += weights(i) * half_sigma2 * sin2;
    }
    return EnergyGrowth{kinetic, potential, kinetic + potential};
}

// Full covariance of the zero-initial-condition solution at alpha = 0,
// assembled from the sin/cos solution formulas in the eigenbasis of V.
inline Eigen::MatrixXd covariance_alpha0(const SystemSpec& spec, double t) {
    if (spec.alpha != 0.0) {
        throw std::invalid_argument("covariance_alpha0: requires alpha = 0");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.hamiltonian.coupling());
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("covariance_alpha0: eigendecomposition failed");
    }
    const int n = spec.sites();
    const Eigen::MatrixXd& w = es.eigenvectors();
    const Eigen::VectorXd b = w.row(spec.noise_index0()).transpose();
    Eigen::VectorXd omega(n);
    for (int i = 0; i < n; ++i) omega(i) = std::sqrt(es.eigenvalues()(i));

    const double sigma2 = spec.sigma * spec.sigma;
    Eigen::MatrixXd cqq(n, n), cpp(n, n), cqp(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double minus = omega(i) - omega(j);
            const double plus = omega(i) + omega(j);
            const double int_ss =
                0.5 * (detail::sin_t_over(minus, t) - detail::sin_t_over(plus, t));
            const double int_cc =
                0.5 * (detail::sin_t_over(minus, t) + detail::sin_t_over(plus, t));
            const double int_sc = 0.5 * (detail::one_minus_cos_over(plus, t) +
                                         detail::one_minus_cos_over(minus, t));
            const double bij = sigma2 * b(i) * b(j);
            cqq(i, j) = bij * int_ss / (omega(i) * omega(j));
            cpp(i, j) = bij * int_cc;
            cqp(i, j) = bij * int_sc / omega(i);
        }
    }
    Eigen::MatrixXd c(2 * n, 2 * n);
    c.topLeftCorner(n, n) = w * cqq * w.transpose();
    c.bottomRightCorner(n, n) = w * cpp * w.transpose();
    c.topRightCorner(n, n) = w * cqp * w.transpose();
    c.bottomLeftCorner(n, n) = c.topRightCorner(n, n).transpose();
    return 0.5 * (c + c.transpose().eval());
}

}  // namespace thermolin
