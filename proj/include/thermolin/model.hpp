// model.hpp — Problem instances: coupling matrix, noise/dissipation placement,
// drift matrix, energy forms, and generators for random and chain couplings.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace thermolin {

// Relative tolerance for accepting a coupling matrix as symmetric.
inline constexpr double kSymmetryTol = 1e-10;

// --------------------------------- Hamiltonian -------------------------------

// Quadratic energy H = T + U with T = |p|^2/2 and U = q^T V q / 2.
// V must be symmetric positive definite; inputs are symmetrized before use
// and rejected if the asymmetry exceeds kSymmetryTol relative to ||V||.
class Hamiltonian {
public:
    explicit Hamiltonian(Eigen::MatrixXd v) {
        if (v.rows() == 0 || v.rows() != v.cols()) {
            throw std::invalid_argument("Hamiltonian: coupling matrix must be square and non-empty");
        }
        if (!v.allFinite()) {
            throw std::invalid_argument("Hamiltonian: coupling matrix has non-finite entries");
        }
        const double scale = v.norm();
        const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
        if (asym > kSymmetryTol * std::max(scale, 1e-300)) {
            std::ostringstream msg;
            msg << "Hamiltonian: coupling matrix asymmetry " << asym
                << " exceeds tolerance " << kSymmetryTol * scale;
            throw std::invalid_argument(msg.str());
        }
        v_ = 0.5 * (v + v.transpose().eval());
        Eigen::LLT<Eigen::MatrixXd> llt(v_);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument("Hamiltonian: coupling matrix is not positive definite");
        }
        n_ = static_cast<int>(v_.rows());
    }

    int size() const { return n_; }
    const Eigen::MatrixXd& coupling() const { return v_; }

private:
    int n_{0};
    Eigen::MatrixXd v_;
};

// --------------------------------- PhaseVector -------------------------------

// A point psi = (q, p) in the 2N-dimensional phase space.
struct PhaseVector {
    Eigen::VectorXd q;
    Eigen::VectorXd p;

    PhaseVector() = default;
    PhaseVector(Eigen::VectorXd q_in, Eigen::VectorXd p_in)
        : q(std::move(q_in)), p(std::move(p_in)) {
        if (q.size() != p.size()) {
            throw std::invalid_argument("PhaseVector: q and p must have equal length");
        }
    }

    static PhaseVector zero(int n) {
        return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    }

    static PhaseVector from_stacked(const Eigen::VectorXd& psi) {
        if (psi.size() % 2 != 0) {
            throw std::invalid_argument("PhaseVector: stacked vector must have even length");
        }
        const Eigen::Index n = psi.size() / 2;
        return {psi.head(n), psi.tail(n)};
    }

    int sites() const { return static_cast<int>(q.size()); }

    Eigen::VectorXd stacked() const {
        Eigen::VectorXd psi(2 * q.size());
        psi << q, p;
        return psi;
    }

    double norm() const { return std::sqrt(q.squaredNorm() + p.squaredNorm()); }
};

// --------------------------------- SystemSpec --------------------------------

// Full problem instance: coupling, dissipation rate alpha >= 0, noise
// amplitude sigma > 0, and the 1-based distinguished coordinate index n.
struct SystemSpec {
    Hamiltonian hamiltonian;
    double alpha;
    double sigma;
    int n;  // 1-based, matching user-facing convention

    SystemSpec(Hamiltonian h, double alpha_in, double sigma_in, int n_in)
        : hamiltonian(std::move(h)), alpha(alpha_in), sigma(sigma_in), n(n_in) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
            throw std::invalid_argument("SystemSpec: alpha must be finite and >= 0");
        }
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw std::invalid_argument("SystemSpec: sigma must be finite and > 0");
        }
        if (n < 1 || n > hamiltonian.size()) {
            throw std::invalid_argument("SystemSpec: distinguished index n out of range [1, N]");
        }
    }

    int sites() const { return hamiltonian.size(); }
    int noise_index0() const { return n - 1; }
};

// --------------------------------- DriftMatrix -------------------------------

// Block matrix A = (0, E; -V, -D) with D = alpha * Delta_n, plus the noise
// direction g_n = (0, e_n).
struct DriftMatrix {
    Eigen::MatrixXd a;             // 2N x 2N
    Eigen::VectorXd noise_vector;  // g_n, length 2N

    int sites() const { return static_cast<int>(a.rows()) / 2; }
};

inline DriftMatrix build_drift(const SystemSpec& spec) {
    const int n = spec.sites();
    const int k = spec.noise_index0();
    DriftMatrix drift;
    drift.a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    drift.a.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    drift.a.bottomLeftCorner(n, n) = -spec.hamiltonian.coupling();
    drift.a(n + k, n + k) = -spec.alpha;
    drift.noise_vector = Eigen::VectorXd::Zero(2 * n);
    drift.noise_vector(n + k) = 1.0;
    return drift;
}

// ---------------------------------- Energy -----------------------------------

inline double energy(const Hamiltonian& h, const PhaseVector& psi) {
    if (psi.sites() != h.size()) {
        throw std::invalid_argument("energy: phase vector dimension does not match coupling");
    }
    const double kinetic = 0.5 * psi.p.squaredNorm();
    const double potential = 0.5 * psi.q.dot(h.coupling() * psi.q);
    return kinetic + potential;
}

// Q = diag(V, E); H(psi) = psi^T Q psi / 2.
inline Eigen::MatrixXd energy_form(const Hamiltonian& h) {
    const int n = h.size();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    q.topLeftCorner(n, n) = h.coupling();
    q.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return q;
}

// --------------------------------- Generators --------------------------------

// Wishart-plus-shift draw: V = G G^T + conditioning * I with G a seeded
// standard-Gaussian N x N matrix. Deterministic per seed.
inline Hamiltonian random_spd(int n, std::uint64_t seed, double conditioning = 0.1) {
    if (n < 1) {
        throw std::invalid_argument("random_spd: N must be >= 1");
    }
    if (!(conditioning > 0.0)) {
        throw std::invalid_argument("random_spd: conditioning must be > 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g(i, j) = gauss(rng);
        }
    }
    Eigen::MatrixXd v = g * g.transpose() + conditioning * Eigen::MatrixXd::Identity(n, n);
    v = 0.5 * (v + v.transpose().eval());
    return Hamiltonian(std::move(v));
}

// Nearest-neighbor chain: omega^2 + 2c on the diagonal, -c off-diagonal.
inline Hamiltonian chain_hamiltonian(int n, double omega, double coupling) {
    if (n < 1) {
        throw std::invalid_argument("chain_hamiltonian: N must be >= 1");
    }
    if (!(omega > 0.0) || coupling < 0.0) {
        throw std::invalid_argument("chain_hamiltonian: require omega > 0 and coupling >= 0");
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        v(i, i) = omega * omega + 2.0 * coupling;
        if (i + 1 < n) {
            v(i, i + 1) = -coupling;
            v(i + 1, i) = -coupling;
        }
    }
    return Hamiltonian(std::move(v));  // constructor rejects non-PD combinations
}

}  // namespace thermolin
