#pragma once

/*
 * Hermitian block linear algebra on dense complex matrices.
 *
 * PartitionedMatrix carries a Hermitian matrix together with a block
 * partition (two or three diagonal blocks).  On top of it sit the
 * spectral primitives used everywhere else: eigendecompositions,
 * functional calculus f(M) = V f(L) V*, Schur complements, partitioned
 * inverses and positivity verdicts.
 *
 * Inputs are symmetrized to (M + M*)/2 once at construction; all
 * spectral work happens on the symmetrized matrix.
 */

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace ccr {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

// Largest singular value.
inline double opnorm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

inline double max_abs(const Matrix& M) {
    return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

inline double hermitian_defect(const Matrix& M) {
    return max_abs(M - M.adjoint());
}

class PartitionedMatrix {
  public:
    // Symmetrizes the entries; rejects if the asymmetry exceeds
    // herm_tol * max(1, max|entry|) in the max norm.
    PartitionedMatrix(std::vector<Index> dims, Matrix entries, double herm_tol = 1e-12)
        : dims_(std::move(dims)) {
        const Index side = std::accumulate(dims_.begin(), dims_.end(), Index{0});
        if (entries.rows() != side || entries.cols() != side)
            throw DimensionMismatch("matrix side " + std::to_string(entries.rows()) +
                                    " does not match partition total " + std::to_string(side));
        for (Index d : dims_)
            if (d <= 0) throw DimensionMismatch("partition blocks must be positive");
        const double asym = hermitian_defect(entries);
        if (asym > herm_tol * std::max(1.0, max_abs(entries))) throw NotHermitian(asym);
        entries_ = 0.5 * (entries + entries.adjoint().eval());
        offsets_.resize(dims_.size() + 1, 0);
        for (std::size_t i = 0; i < dims_.size(); ++i) offsets_[i + 1] = offsets_[i] + dims_[i];
    }

    Index side() const { return entries_.rows(); }
    std::size_t block_count() const { return dims_.size(); }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim(std::size_t i) const { return dims_.at(i); }
    Index offset(std::size_t i) const { return offsets_.at(i); }
    const Matrix& entries() const { return entries_; }

    Matrix block(std::size_t i, std::size_t j) const {
        return entries_.block(offset(i), offset(j), dim(i), dim(j));
    }

    // Principal submatrix over a subset of blocks, partition retained.
    PartitionedMatrix principal(const std::vector<std::size_t>& blocks) const {
        if (blocks.empty()) throw EmptySelection("no blocks selected");
        std::vector<Index> sel_dims;
        Index n = 0;
        for (std::size_t b : blocks) {
            sel_dims.push_back(dim(b));
            n += dim(b);
        }
        Matrix sub(n, n);
        Index ro = 0;
        for (std::size_t bi : blocks) {
            Index co = 0;
            for (std::size_t bj : blocks) {
                sub.block(ro, co, dim(bi), dim(bj)) = block(bi, bj);
                co += dim(bj);
            }
            ro += dim(bi);
        }
        return PartitionedMatrix(sel_dims, sub, 1e-9);
    }

  private:
    std::vector<Index> dims_;
    std::vector<Index> offsets_;
    Matrix entries_;
};

struct EigenDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // unitary, columns
};

inline EigenDecomposition eig_hermitian(const Matrix& M, double herm_tol = 1e-12) {
    const double asym = hermitian_defect(M);
    if (asym > herm_tol * std::max(1.0, max_abs(M))) throw NotHermitian(asym);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.adjoint().eval()));
    if (solver.info() != Eigen::Success)
        throw SingularMatrix("eigendecomposition failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline EigenDecomposition eig_hermitian(const PartitionedMatrix& M) {
    return eig_hermitian(M.entries());
}

// f(M) = V f(L) V* for real-valued f; Hermitian result.
inline Matrix matrix_function(const Matrix& M, const std::function<double(double)>& f) {
    auto ed = eig_hermitian(M);
    RealVector fl(ed.eigenvalues.size());
    for (Index i = 0; i < fl.size(); ++i) fl(i) = f(ed.eigenvalues(i));
    return ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint();
}

// Same, with an explicit spectral domain check.
inline Matrix matrix_function(const Matrix& M, const std::function<double(double)>& f,
                              const std::function<bool(double)>& in_domain,
                              const std::string& fname = "f") {
    auto ed = eig_hermitian(M);
    RealVector fl(ed.eigenvalues.size());
    for (Index i = 0; i < fl.size(); ++i) {
        if (!in_domain(ed.eigenvalues(i)))
            throw DomainError("eigenvalue " + std::to_string(ed.eigenvalues(i)) +
                              " outside the domain of " + fname);
        fl(i) = f(ed.eigenvalues(i));
    }
    return ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint();
}

// Complex-valued scalar function of a Hermitian matrix (e.g. x -> x^{it});
// result is normal, V f(L) V* exactly.
inline Matrix matrix_function_complex(const Matrix& M, const std::function<cxd(double)>& f) {
    auto ed = eig_hermitian(M);
    Vector fl(ed.eigenvalues.size());
    for (Index i = 0; i < fl.size(); ++i) fl(i) = f(ed.eigenvalues(i));
    return ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint();
}

// M^{it} = exp(it log M); requires the spectrum strictly above zero.
inline Matrix imaginary_power(const Matrix& M, double t, double strict_tol = 1e-12) {
    auto ed = eig_hermitian(M);
    if (ed.eigenvalues.size() == 0 || ed.eigenvalues(0) <= strict_tol)
        throw NotStrictlyPositive(ed.eigenvalues.size() ? ed.eigenvalues(0) : 0.0);
    Vector fl(ed.eigenvalues.size());
    for (Index i = 0; i < fl.size(); ++i)
        fl(i) = std::exp(cxd(0.0, t * std::log(ed.eigenvalues(i))));
    return ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint();
}

inline double logdet_positive(const Matrix& M) {
    auto ed = eig_hermitian(M);
    double s = 0.0;
    for (Index i = 0; i < ed.eigenvalues.size(); ++i) {
        if (ed.eigenvalues(i) <= 0.0)
            throw SingularMatrix("determinant of a non-positive matrix requested");
        s += std::log(ed.eigenvalues(i));
    }
    return s;
}

namespace detail {

// Inverse of a square block via SVD; rejects condition numbers above cond_cap.
inline Matrix guarded_inverse(const Matrix& S, double cond_cap) {
    Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || sv(0) / smin > cond_cap) throw SingularBlock(smin);
    return svd.solve(Matrix::Identity(S.rows(), S.cols()));
}

}  // namespace detail

// Schur complement of a 2-way partitioned M = [[P, Q], [R, S]]:
// against = 1 gives M/S = P - Q S^{-1} R, against = 0 gives M/P = S - R P^{-1} Q.
inline Matrix schur_complement(const PartitionedMatrix& M, std::size_t against,
                               double cond_cap = 1e12) {
    if (M.block_count() != 2) throw PartitionMismatch("schur_complement needs a 2-way partition");
    if (against > 1) throw PartitionMismatch("block index must be 0 or 1");
    const Matrix P = M.block(0, 0), Q = M.block(0, 1), R = M.block(1, 0), S = M.block(1, 1);
    if (against == 1) return P - Q * detail::guarded_inverse(S, cond_cap) * R;
    return S - R * detail::guarded_inverse(P, cond_cap) * Q;
}

// Block inverse of [[P, Q], [R, S]] assembled from the Schur complement M/S:
//   [ (M/S)^{-1}              -(M/S)^{-1} Q S^{-1}                 ]
//   [ -S^{-1} R (M/S)^{-1}     S^{-1} + S^{-1} R (M/S)^{-1} Q S^{-1} ]
inline PartitionedMatrix partitioned_inverse(const PartitionedMatrix& M, double cond_cap = 1e12) {
    if (M.block_count() != 2)
        throw PartitionMismatch("partitioned_inverse needs a 2-way partition");
    const Matrix P = M.block(0, 0), Q = M.block(0, 1), R = M.block(1, 0), S = M.block(1, 1);
    const Matrix Sinv = detail::guarded_inverse(S, cond_cap);
    const Matrix schur = P - Q * Sinv * R;
    Matrix schur_inv;
    try {
        schur_inv = detail::guarded_inverse(schur, cond_cap);
    } catch (const SingularBlock& e) {
        throw SingularMatrix("matrix is singular: Schur complement not invertible "
                             "(smallest singular value " +
                             std::to_string(e.smallest_singular_value) + ")");
    }
    const Index n = M.side(), d0 = M.dim(0);
    Matrix inv(n, n);
    inv.topLeftCorner(d0, d0) = schur_inv;
    inv.topRightCorner(d0, n - d0) = -schur_inv * Q * Sinv;
    inv.bottomLeftCorner(n - d0, d0) = -Sinv * R * schur_inv;
    inv.bottomRightCorner(n - d0, n - d0) = Sinv + Sinv * R * schur_inv * Q * Sinv;
    const double defect = max_abs(M.entries() * inv - Matrix::Identity(n, n));
    if (defect > 1e-9 * std::max(1.0, max_abs(M.entries())))
        throw SingularMatrix("partitioned inverse verification failed (residual " +
                             std::to_string(defect) + ")");
    return PartitionedMatrix({M.dim(0), M.dim(1)}, inv, 1e-6);
}

struct PsdVerdict {
    bool positive;
    double lambda_min;
};

// Positive semidefinite iff lambda_min >= -tol * (1 + ||M||).
inline PsdVerdict is_positive_semidefinite(const Matrix& M, double tol = 1e-10) {
    auto ed = eig_hermitian(M, 1e-9);
    const double lmin = ed.eigenvalues.size() ? ed.eigenvalues(0) : 0.0;
    const double scale = 1.0 + (ed.eigenvalues.size()
                                    ? std::max(std::abs(ed.eigenvalues(0)),
                                               std::abs(ed.eigenvalues(ed.eigenvalues.size() - 1)))
                                    : 0.0);
    return {lmin >= -tol * scale, lmin};
}

}  // namespace linalg
}  // namespace ccr
