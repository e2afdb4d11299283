#pragma once

/*
 * Truncated Fock-space numerics: occupation-number bases, ladder, field
 * and Weyl operators, second quantization Gamma(U) and its generator
 * dGamma(A), quasi-free density operators and numeric von Neumann entropy.
 *
 * Two truncation policies:
 *   - TotalNumberCutoff keeps all occupation vectors with total <= N.
 *     Particle-number-preserving operators (Gamma, dGamma, density
 *     operators) are exact blockwise under it; truncation only shows up
 *     as missing tail weight.
 *   - PerModeCutoff keeps the full tensor product of single-mode spaces
 *     cut at N.  Required for Weyl/field operators, which change the
 *     particle number.
 *
 * Basis ordering is graded (by total occupation), lexicographically
 * descending within a grade: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
 */

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "specfun.hpp"

namespace ccr::fock {

inline constexpr std::size_t kMaxBasisStates = 200000;

enum class CutoffKind { PerMode, TotalNumber };

struct CutoffPolicy {
    CutoffKind kind;
    int cutoff;
    static CutoffPolicy per_mode(int n) { return {CutoffKind::PerMode, n}; }
    static CutoffPolicy total(int n) { return {CutoffKind::TotalNumber, n}; }
};

class OccupationBasis {
  public:
    OccupationBasis(int modes, CutoffPolicy policy) : modes_(modes), policy_(policy) {
        if (modes <= 0) throw DimensionMismatch("mode count must be positive");
        if (policy.cutoff < 0) throw DomainError("cutoff must be nonnegative");
        check_size();
        std::vector<int> state(modes_, 0);
        enumerate(state, 0, 0);
        std::sort(states_.begin(), states_.end(), [](const auto& a, const auto& b) {
            const int ta = std::accumulate(a.begin(), a.end(), 0);
            const int tb = std::accumulate(b.begin(), b.end(), 0);
            if (ta != tb) return ta < tb;
            return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
        });
        for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = static_cast<int>(i);
    }

    int modes() const { return modes_; }
    const CutoffPolicy& policy() const { return policy_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<int>& state(std::size_t i) const { return states_.at(i); }
    int total(std::size_t i) const {
        return std::accumulate(states_[i].begin(), states_[i].end(), 0);
    }

    std::optional<int> index_of(const std::vector<int>& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

  private:
    void check_size() const {
        double count = 1.0;
        if (policy_.kind == CutoffKind::PerMode) {
            for (int k = 0; k < modes_; ++k) {
                count *= policy_.cutoff + 1;
                if (count > double(kMaxBasisStates)) break;
            }
        } else {
            // C(N + m, m)
            for (int k = 1; k <= modes_; ++k) count *= double(policy_.cutoff + k) / k;
        }
        if (count > double(kMaxBasisStates))
            throw BasisTooLarge("requested basis has about " + std::to_string(count) +
                                " states; cap is " + std::to_string(kMaxBasisStates));
    }

    void enumerate(std::vector<int>& state, int mode, int used) {
        if (mode == modes_) {
            states_.push_back(state);
            return;
        }
        const int room = policy_.kind == CutoffKind::PerMode ? policy_.cutoff
                                                             : policy_.cutoff - used;
        for (int r = 0; r <= room; ++r) {
            state[mode] = r;
            enumerate(state, mode + 1, used + r);
        }
        state[mode] = 0;
    }

    int modes_;
    CutoffPolicy policy_;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, int> index_;
};

using BasisPtr = std::shared_ptr<const OccupationBasis>;

inline BasisPtr enumerate_basis(int modes, CutoffPolicy policy) {
    return std::make_shared<OccupationBasis>(modes, policy);
}

struct TruncatedOperator {
    BasisPtr basis;
    Matrix matrix;
    // Deviation of the realized operator from its exact matrix elements on
    // the interior window; only populated where a closed form exists (Weyl).
    double truncation_defect = 0.0;
    bool truncation_warning() const { return truncation_defect > 1e-6; }
};

// Annihilation/creation pair for one mode: a|..r..> = sqrt(r)|..r-1..>,
// a+ is the exact adjoint matrix.  Images outside the cutoff map to zero.
inline std::pair<TruncatedOperator, TruncatedOperator> ladder_operators(const BasisPtr& basis,
                                                                        int mode) {
    if (mode < 0 || mode >= basis->modes()) throw DimensionMismatch("mode index out of range");
    const auto n = static_cast<Index>(basis->size());
    Matrix a = Matrix::Zero(n, n);
    std::vector<int> target;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const auto& r = basis->state(col);
        if (r[mode] == 0) continue;
        target = r;
        target[mode] -= 1;
        if (auto row = basis->index_of(target))
            a(*row, static_cast<Index>(col)) = std::sqrt(double(r[mode]));
    }
    return {TruncatedOperator{basis, a}, TruncatedOperator{basis, a.adjoint()}};
}

namespace detail {

inline void require_total(const BasisPtr& basis, const char* who) {
    if (basis->policy().kind != CutoffKind::TotalNumber)
        throw PolicyMismatch(std::string(who) + " needs a TotalNumberCutoff basis");
}

inline void require_per_mode(const BasisPtr& basis, const char* who) {
    if (basis->policy().kind != CutoffKind::PerMode)
        throw PolicyMismatch(std::string(who) + " needs a PerModeCutoff basis");
}

inline double log_multifactorial(const std::vector<int>& r) {
    double s = 0.0;
    for (int k : r) s += specfun::log_factorial(k);
    return s;
}

}  // namespace detail

// Second quantization Gamma(U)|f_1,...,f_n> = |Uf_1,...,Uf_n>.
//
// In the identification of the symmetric tensor algebra with polynomials
// (normalized basis vector <-> x^r / sqrt(r!)), Gamma(U) is the
// substitution x_i -> sum_j U_{ji} x_j.  Each column is expanded by
// repeated multiplication with the substituted linear forms; the matrix
// element picks up sqrt(s!/r!).  Exact blockwise on a total-number cutoff.
inline TruncatedOperator gamma_op(const Matrix& U, const BasisPtr& basis) {
    detail::require_total(basis, "gamma_op");
    const int m = basis->modes();
    if (U.rows() != m || U.cols() != m)
        throw DimensionMismatch("one-particle operator must be modes x modes");
    const auto n = static_cast<Index>(basis->size());
    Matrix G = Matrix::Zero(n, n);
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const auto& r = basis->state(col);
        std::map<std::vector<int>, cxd> poly{{std::vector<int>(m, 0), cxd(1.0, 0.0)}};
        for (int i = 0; i < m; ++i) {
            for (int rep = 0; rep < r[i]; ++rep) {
                std::map<std::vector<int>, cxd> next;
                for (const auto& [mono, coeff] : poly) {
                    for (int j = 0; j < m; ++j) {
                        if (U(j, i) == cxd(0.0, 0.0)) continue;
                        std::vector<int> mo = mono;
                        mo[j] += 1;
                        next[mo] += coeff * U(j, i);
                    }
                }
                poly.swap(next);
            }
        }
        const double lr = detail::log_multifactorial(r);
        for (const auto& [mono, coeff] : poly) {
            const auto row = basis->index_of(mono);
            if (!row) continue;  // cannot happen: substitution preserves the grade
            const double w = std::exp(0.5 * (detail::log_multifactorial(mono) - lr));
            G(*row, static_cast<Index>(col)) = coeff * w;
        }
    }
    return {basis, G};
}

// dGamma(A) = sum_{ij} A_{ji} a+_j a_i, the generator with
// exp(it dGamma(A)) = Gamma(exp(itA)).  Satisfies dGamma(|f><g|) = a+(f) a(g).
inline TruncatedOperator dgamma(const Matrix& A, const BasisPtr& basis) {
    detail::require_total(basis, "dgamma");
    const int m = basis->modes();
    if (A.rows() != m || A.cols() != m)
        throw DimensionMismatch("one-particle operator must be modes x modes");
    const auto n = static_cast<Index>(basis->size());
    Matrix F = Matrix::Zero(n, n);
    std::vector<int> target;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const auto& r = basis->state(col);
        for (int i = 0; i < m; ++i) {
            if (r[i] == 0) continue;
            for (int j = 0; j < m; ++j) {
                if (A(j, i) == cxd(0.0, 0.0)) continue;
                target = r;
                target[i] -= 1;
                target[j] += 1;
                const auto row = basis->index_of(target);
                if (!row) continue;
                F(*row, static_cast<Index>(col)) +=
                    A(j, i) * std::sqrt(double(r[i]) * double(target[j]));
            }
        }
    }
    return {basis, F};
}

namespace detail {

inline Matrix weyl_generator(const Vector& f, const BasisPtr& basis) {
    const auto n = static_cast<Index>(basis->size());
    Matrix G = Matrix::Zero(n, n);
    for (int k = 0; k < basis->modes(); ++k) {
        auto [a, ad] = ladder_operators(basis, k);
        G += f(k) * a.matrix - std::conj(f(k)) * ad.matrix;
    }
    return G;
}

// exp(G) for skew-Hermitian G, via the eigendecomposition of -iG.
inline Matrix exp_skew(const Matrix& G) {
    auto ed = linalg::eig_hermitian(cxd(0.0, -1.0) * G, 1e-9);
    Vector ph(ed.eigenvalues.size());
    for (Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cxd(0.0, ed.eigenvalues(i)));
    return ed.eigenvectors * ph.asDiagonal() * ed.eigenvectors.adjoint();
}

// Exact multimode Weyl element: the generator splits over modes, so
// W(f) = tensor product of single-mode displacements.
inline cxd exact_weyl_element(const std::vector<int>& row, const std::vector<int>& col,
                              const Vector& f) {
    cxd v(1.0, 0.0);
    for (std::size_t k = 0; k < row.size(); ++k)
        v *= specfun::weyl_matrix_element(row[k], col[k], f(static_cast<Index>(k)));
    return v;
}

}  // namespace detail

// Sign convention for the Weyl generator, fixed by a one-time self-test of
// the composition law W(z)W(z') = W(z+z') exp(i Im(conj(z) z')) on a small
// single-mode truncation.
inline const std::string& weyl_sign_convention() {
    static const std::string convention = [] {
        const auto basis = enumerate_basis(1, CutoffPolicy::per_mode(24));
        const cxd z1(0.3, 0.1), z2(-0.1, 0.25);
        Vector f1(1), f2(1), f12(1);
        f1 << z1;
        f2 << z2;
        f12 << z1 + z2;
        const Matrix W1 = detail::exp_skew(detail::weyl_generator(f1, basis));
        const Matrix W2 = detail::exp_skew(detail::weyl_generator(f2, basis));
        const Matrix W12 = detail::exp_skew(detail::weyl_generator(f12, basis));
        const cxd phase = std::exp(cxd(0.0, std::imag(std::conj(z1) * z2)));
        // interior window: truncation garbage lives near the cutoff boundary
        const Matrix diff = (W1 * W2 - phase * W12).topLeftCorner(12, 12);
        if (linalg::max_abs(diff) > 1e-10)
            throw Error("Weyl sign convention self-test failed");
        return std::string("W(f) = exp(sum_k f_k a_k - conj(f_k) a_k^+)");
    }();
    return convention;
}

// Weyl unitary W(f) = exp(sum_k f_k a_k - conj(f_k) a_k^+) on a per-mode
// cutoff.  The result is exactly unitary (exponential of a skew-Hermitian
// truncation); truncation error is reported as the maximum deviation from
// the closed-form matrix elements over the interior window of states with
// every occupation <= min(10, N/2).
inline TruncatedOperator weyl_operator(const Vector& f, const BasisPtr& basis) {
    detail::require_per_mode(basis, "weyl_operator");
    if (f.size() != basis->modes())
        throw DimensionMismatch("argument dimension must equal the mode count");
    weyl_sign_convention();
    const Matrix W = detail::exp_skew(detail::weyl_generator(f, basis));

    const int window = std::min(10, basis->policy().cutoff / 2);
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const auto& s = basis->state(i);
        if (*std::max_element(s.begin(), s.end()) <= window) interior.push_back(i);
    }
    double defect = 0.0;
    for (std::size_t i : interior)
        for (std::size_t j : interior)
            defect = std::max(defect,
                              std::abs(W(static_cast<Index>(i), static_cast<Index>(j)) -
                                       detail::exact_weyl_element(basis->state(i),
                                                                  basis->state(j), f)));
    return {basis, W, defect};
}

// Field operator B(f): the self-adjoint generator with
// exp(it B(f)) = W(tf).  For a single mode, B(i/sqrt(2)) = Q and
// B(1/sqrt(2)) = P.
inline TruncatedOperator field_operator(const Vector& f, const BasisPtr& basis) {
    if (f.size() != basis->modes())
        throw DimensionMismatch("argument dimension must equal the mode count");
    // -i times a skew-Hermitian matrix; Hermitian exactly, entry by entry
    Matrix B = cxd(0.0, -1.0) * detail::weyl_generator(f, basis);
    return {basis, std::move(B)};
}

struct DensityResult {
    TruncatedOperator op;
    double tail_weight;  // 1 - trace of the truncated density operator
};

// Quasi-free density operator D_A = Gamma(A(I+A)^{-1}) / det(I+A),
// truncated to the basis; the normalization is the exact infinite-space
// one, so 1 - trace is the weight lost to truncation.
inline DensityResult density_operator(const Matrix& A, const BasisPtr& basis) {
    detail::require_total(basis, "density_operator");
    const auto verdict = linalg::is_positive_semidefinite(A);
    if (!verdict.positive) throw NotPositive(verdict.lambda_min);
    const bool diagonal = (A - Matrix(A.diagonal().asDiagonal())).isZero(0.0);
    Matrix K;
    if (diagonal) {  // keep K exactly diagonal so Gamma(K) stays diagonal
        K = Matrix::Zero(A.rows(), A.cols());
        for (Index i = 0; i < A.rows(); ++i) {
            const double l = std::max(0.0, A(i, i).real());
            K(i, i) = l / (1.0 + l);
        }
    } else {
        K = linalg::matrix_function(A, [](double x) { return x <= 0.0 ? 0.0 : x / (1.0 + x); });
    }
    TruncatedOperator G = gamma_op(K, basis);
    auto ed = linalg::eig_hermitian(A, 1e-9);
    double logc = 0.0;
    for (Index i = 0; i < ed.eigenvalues.size(); ++i)
        logc += std::log1p(std::max(0.0, ed.eigenvalues(i)));
    G.matrix /= std::exp(logc);
    const double tail = 1.0 - G.matrix.trace().real();
    return {std::move(G), tail};
}

// -sum p log p over the eigenvalues clamped to [0, 1]; natural log.
// Exactly diagonal density matrices (the common case for diagonal A)
// bypass the dense eigensolver.
inline double vn_entropy_numeric(const TruncatedOperator& rho) {
    const double trace_defect = std::abs(rho.matrix.trace().real() - 1.0);
    if (trace_defect > 1e-3)
        throw NotAState("trace deviates from 1 by " + std::to_string(trace_defect));
    RealVector p;
    if ((rho.matrix - Matrix(rho.matrix.diagonal().asDiagonal())).isZero(0.0)) {
        p = rho.matrix.diagonal().real();
    } else {
        p = linalg::eig_hermitian(rho.matrix, 1e-9).eigenvalues;
    }
    double s = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p(i), 0.0, 1.0);
        if (q > 0.0) s -= q * std::log(q);
    }
    return s;
}

}  // namespace ccr::fock
