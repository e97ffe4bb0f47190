// structure.hpp — Krylov subspace reached by the noise, the invariant
// splitting L = L0 ⊕ L-, the controllability determinant test, and the
// restricted system on L-.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "thermolin/model.hpp"

namespace thermolin {

// Residual cutoff for the Krylov iteration, relative to ||V||_F.
inline constexpr double kDefaultRankTol = 1e-9;
// Cutoff on |det Sigma| normalized by the product of column norms.
inline constexpr double kDetDegenerateTol = 1e-10;

// -------------------------------- KrylovBasis --------------------------------

// Orthonormal basis v_1..v_d of span{V^k e_n}, with v_1 = e_n exactly.
// Because every later vector is orthogonalized against v_1 = e_n, the n-th
// component of v_2..v_d is exactly zero in floating point.
struct KrylovBasis {
    Eigen::MatrixXd vectors;  // N x d, orthonormal columns
    int n;                    // 1-based distinguished index
    // Rank-decision transparency: smallest residual that was accepted and the
    // residual that terminated the iteration (0 when the basis filled the
    // whole space and nothing was discarded).
    double min_retained_residual = std::numeric_limits<double>::infinity();
    double max_discarded_residual = 0.0;

    int dim() const { return static_cast<int>(vectors.cols()); }
};

inline KrylovBasis krylov_subspace(const Hamiltonian& h, int n,
                                   double rank_tol = kDefaultRankTol) {
    const int size = h.size();
    if (n < 1 || n > size) {
        throw std::invalid_argument("krylov_subspace: index n out of range [1, N]");
    }
    const Eigen::MatrixXd& v = h.coupling();
    const double cutoff = rank_tol * std::max(v.norm(), 1e-300);

    KrylovBasis basis;
    basis.n = n;
    basis.vectors = Eigen::MatrixXd::Zero(size, size);
    basis.vectors(n - 1, 0) = 1.0;  // v_1 = e_n exactly
    int d = 1;

    Eigen::VectorXd w(size);
    while (d < size) {
        w = v * basis.vectors.col(d - 1);
        // Twice-is-enough Gram-Schmidt against the accepted basis.
        for (int round = 0; round < 2; ++round) {
            for (int k = 0; k < d; ++k) {
                w -= basis.vectors.col(k).dot(w) * basis.vectors.col(k);
            }
        }
        const double residual = w.norm();
        if (residual <= cutoff) {
            basis.max_discarded_residual = residual;
            break;
        }
        basis.min_retained_residual = std::min(basis.min_retained_residual, residual);
        basis.vectors.col(d) = w / residual;
        ++d;
    }
    basis.vectors.conservativeResize(size, d);
    return basis;
}

// ------------------------------- Sigma(V) test --------------------------------

// Columns V^0 e_n, ..., V^{N-1} e_n. det Sigma = 0 characterizes couplings
// whose conservative complement L0 is nontrivial.
inline Eigen::MatrixXd sigma_matrix(const Hamiltonian& h, int n) {
    const int size = h.size();
    if (n < 1 || n > size) {
        throw std::invalid_argument("sigma_matrix: index n out of range [1, N]");
    }
    Eigen::MatrixXd sigma(size, size);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(size);
    col(n - 1) = 1.0;
    for (int k = 0; k < size; ++k) {
        sigma.col(k) = col;
        col = h.coupling() * col;
    }
    return sigma;
}

struct SigmaTest {
    double margin;    // |det| of the column-normalized Sigma, in [0, 1]
    bool degenerate;  // margin <= tol
};

// Raw determinants scale badly with N, so the verdict uses the determinant of
// the column-normalized matrix (equivalently |det| / prod of column norms).
inline SigmaTest sigma_degeneracy(const Hamiltonian& h, int n,
                                  double tol = kDetDegenerateTol) {
    Eigen::MatrixXd sigma = sigma_matrix(h, n);
    for (Eigen::Index k = 0; k < sigma.cols(); ++k) {
        const double norm = sigma.col(k).norm();
        if (norm > 0.0) sigma.col(k) /= norm;
    }
    const double margin = std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(sigma).determinant());
    return SigmaTest{margin, margin <= tol};
}

// --------------------------- SubspaceDecomposition ---------------------------

// basis_minus columns are (v_k, 0) for k = 1..d followed by (0, v_k); the
// primed coordinates therefore stack as (q', p'). basis_zero doubles the
// orthogonal complement of the Krylov space the same way.
struct SubspaceDecomposition {
    KrylovBasis krylov;
    Eigen::MatrixXd basis_minus;      // 2N x 2d
    Eigen::MatrixXd basis_zero;       // 2N x 2(N-d)
    Eigen::MatrixXd projector_minus;  // 2N x 2N
    Eigen::MatrixXd projector_zero;   // 2N x 2N

    int sites() const { return static_cast<int>(basis_minus.rows()) / 2; }
    int dim_minus() const { return static_cast<int>(basis_minus.cols()); }
    int dim_zero() const { return static_cast<int>(basis_zero.cols()); }
};

inline SubspaceDecomposition build_decomposition(const Hamiltonian& h, int n,
                                                 double rank_tol = kDefaultRankTol) {
    SubspaceDecomposition dec;
    dec.krylov = krylov_subspace(h, n, rank_tol);
    const int size = h.size();
    const int d = dec.krylov.dim();
    const Eigen::MatrixXd& k = dec.krylov.vectors;

    dec.basis_minus = Eigen::MatrixXd::Zero(2 * size, 2 * d);
    dec.basis_minus.topLeftCorner(size, d) = k;
    dec.basis_minus.bottomRightCorner(size, d) = k;

    // Orthogonal complement of the Krylov space, fixed deterministically by a
    // Householder factorization of the stacked basis.
    Eigen::MatrixXd complement(size, size - d);
    if (d < size) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
        Eigen::MatrixXd q = qr.householderQ();
        complement = q.rightCols(size - d);
    }
    dec.basis_zero = Eigen::MatrixXd::Zero(2 * size, 2 * (size - d));
    dec.basis_zero.topLeftCorner(size, size - d) = complement;
    dec.basis_zero.bottomRightCorner(size, size - d) = complement;

    dec.projector_minus = dec.basis_minus * dec.basis_minus.transpose();
    dec.projector_zero = dec.basis_zero * dec.basis_zero.transpose();
    return dec;
}

// Returns (psi_zero, psi_minus): the conservative and thermalizing parts.
inline std::pair<PhaseVector, PhaseVector> decompose_state(const PhaseVector& psi,
                                                           const SubspaceDecomposition& dec) {
    if (psi.sites() != dec.sites()) {
        throw std::invalid_argument("decompose_state: dimension mismatch");
    }
    const Eigen::VectorXd stacked = psi.stacked();
    const Eigen::VectorXd zero_part = dec.projector_zero * stacked;
    const Eigen::VectorXd minus_part = dec.projector_minus * stacked;
    return {PhaseVector::from_stacked(zero_part), PhaseVector::from_stacked(minus_part)};
}

// ------------------------------ RestrictedSystem ------------------------------

// The dynamics expressed on L- in the Krylov basis: a 2d-dimensional system
// of the same shape, with the noise attached to the first primed coordinate.
struct RestrictedSystem {
    SubspaceDecomposition decomposition;
    Eigen::MatrixXd v_prime;  // d x d, symmetric positive definite
    Eigen::MatrixXd d_prime;  // d x d, alpha * Delta_1
    Eigen::MatrixXd a_prime;  // 2d x 2d, blocks (0, E; -V', -D')
    Eigen::VectorXd g_prime;  // (0, e_1) in R^{2d}

    int dim() const { return static_cast<int>(v_prime.rows()); }

    // Q' = diag(V', E); H'(psi') = psi'^T Q' psi' / 2.
    Eigen::MatrixXd energy_form() const {
        const int d = dim();
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * d, 2 * d);
        q.topLeftCorner(d, d) = v_prime;
        q.bottomRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
        return q;
    }

    double energy(const Eigen::VectorXd& psi_prime) const {
        const int d = dim();
        if (psi_prime.size() != 2 * d) {
            throw std::invalid_argument("RestrictedSystem::energy: dimension mismatch");
        }
        const double kinetic = 0.5 * psi_prime.tail(d).squaredNorm();
        const double potential = 0.5 * psi_prime.head(d).dot(v_prime * psi_prime.head(d));
        return kinetic + potential;
    }

    // Coordinates of the L- component of psi in the primed basis.
    Eigen::VectorXd restricted_coordinates(const PhaseVector& psi) const {
        return decomposition.basis_minus.transpose() * psi.stacked();
    }

    PhaseVector lift(const Eigen::VectorXd& psi_prime) const {
        return PhaseVector::from_stacked(decomposition.basis_minus * psi_prime);
    }
};

inline RestrictedSystem restrict_system(const SystemSpec& spec,
                                        const SubspaceDecomposition& dec) {
    if (dec.sites() != spec.sites() || dec.krylov.n != spec.n) {
        throw std::invalid_argument("restrict_system: decomposition does not match spec");
    }
    RestrictedSystem r;
    r.decomposition = dec;
    const int d = dec.krylov.dim();
    const Eigen::MatrixXd& k = dec.krylov.vectors;

    Eigen::MatrixXd v_prime = k.transpose() * spec.hamiltonian.coupling() * k;
    r.v_prime = 0.5 * (v_prime + v_prime.transpose().eval());
    // v_1 = e_n and v_k(n) = 0 for k >= 2, so D restricts to alpha * Delta_1.
    r.d_prime = Eigen::MatrixXd::Zero(d, d);
    r.d_prime(0, 0) = spec.alpha;

    r.a_prime = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    r.a_prime.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
    r.a_prime.bottomLeftCorner(d, d) = -r.v_prime;
    r.a_prime.bottomRightCorner(d, d) = -r.d_prime;

    r.g_prime = Eigen::VectorXd::Zero(2 * d);
    r.g_prime(d) = 1.0;
    return r;
}

}  // namespace thermolin
