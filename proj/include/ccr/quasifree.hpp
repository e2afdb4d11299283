#pragma once

/*
 * Quasi-free states in closed form.  A state is a positive partitioned
 * matrix A together with its cached eigendecomposition; entropy,
 * characteristic values, 2-point functions, restrictions and cocycle
 * flows are all spectral formulas in A.
 */

#include <cmath>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace ccr::quasifree {

// eta(x) = -x log x, extended by eta(0) = 0.
inline double eta(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

class QuasiFreeState {
  public:
    // Requires A positive semidefinite within psd_tol (relative); eigenvalue
    // dust in [-tol, 0) is clamped to zero for entropy purposes.
    explicit QuasiFreeState(linalg::PartitionedMatrix A, double psd_tol = 1e-10)
        : A_(std::move(A)), eig_(linalg::eig_hermitian(A_)) {
        const double scale =
            1.0 + (eig_.eigenvalues.size()
                       ? std::max(std::abs(eig_.eigenvalues(0)),
                                  std::abs(eig_.eigenvalues(eig_.eigenvalues.size() - 1)))
                       : 0.0);
        if (eig_.eigenvalues.size() && eig_.eigenvalues(0) < -psd_tol * scale)
            throw NotPositive(eig_.eigenvalues(0));
        clamped_ = eig_.eigenvalues.cwiseMax(0.0);
    }

    const linalg::PartitionedMatrix& matrix() const { return A_; }
    const linalg::EigenDecomposition& eig() const { return eig_; }
    const RealVector& spectrum() const { return clamped_; }
    Index dim() const { return A_.side(); }

    bool strictly_positive(double threshold = 1e-12) const {
        return eig_.eigenvalues.size() && eig_.eigenvalues(0) > threshold;
    }

  private:
    linalg::PartitionedMatrix A_;
    linalg::EigenDecomposition eig_;
    RealVector clamped_;
};

// S(omega_A) = sum_i [eta(lambda_i) - eta(lambda_i + 1)], in nats.
inline double entropy_closed_form(const QuasiFreeState& state) {
    double s = 0.0;
    for (Index i = 0; i < state.spectrum().size(); ++i) {
        const double l = state.spectrum()(i);
        s += eta(l) - eta(l + 1.0);
    }
    return s;
}

// omega_A(W(f)) = exp(-||f||^2/2 - <f, A f>); real, in (0, 1].
inline double char_value(const QuasiFreeState& state, const Vector& f) {
    if (f.size() != state.dim())
        throw DimensionMismatch("argument dimension does not match the state");
    const double quad = (f.adjoint() * state.matrix().entries() * f)(0, 0).real();
    return std::exp(-0.5 * f.squaredNorm() - quad);
}

// omega_A(a+(f) a(g)) = <g, A f>, antilinear in g.
inline cxd two_point(const QuasiFreeState& state, const Vector& f, const Vector& g) {
    if (f.size() != state.dim() || g.size() != state.dim())
        throw DimensionMismatch("argument dimension does not match the state");
    return (g.adjoint() * state.matrix().entries() * f)(0, 0);
}

// Restriction to a subset of partition blocks: the principal submatrix.
inline QuasiFreeState restriction(const QuasiFreeState& state,
                                  const std::vector<std::size_t>& blocks) {
    return QuasiFreeState(state.matrix().principal(blocks));
}

struct CocycleFlow {
    Matrix flow;  // (A(I+A)^{-1})^{it} (B(I+B)^{-1})^{-it} on the one-particle space
    cxd phase;    // u_t = det(I+A)^{-it} det(I+B)^{it}
};

// One-particle flow of the cocycle comparing omega_A with omega_B; the full
// cocycle is phase * Gamma(flow).  Both states must be strictly positive.
inline CocycleFlow cocycle_flow(const QuasiFreeState& a, const QuasiFreeState& b, double t) {
    if (a.dim() != b.dim()) throw DimensionMismatch("states live on different spaces");
    auto contraction_power = [t](const QuasiFreeState& s, double sign) {
        if (!s.strictly_positive()) throw NotStrictlyPositive(s.eig().eigenvalues(0));
        Vector ph(s.spectrum().size());
        for (Index i = 0; i < ph.size(); ++i) {
            const double mu = s.eig().eigenvalues(i) / (1.0 + s.eig().eigenvalues(i));
            ph(i) = std::exp(cxd(0.0, sign * t * std::log(mu)));
        }
        return (s.eig().eigenvectors * ph.asDiagonal() * s.eig().eigenvectors.adjoint()).eval();
    };
    const Matrix flow = contraction_power(a, 1.0) * contraction_power(b, -1.0);
    double logca = 0.0, logcb = 0.0;
    for (Index i = 0; i < a.spectrum().size(); ++i) logca += std::log1p(a.spectrum()(i));
    for (Index i = 0; i < b.spectrum().size(); ++i) logcb += std::log1p(b.spectrum()(i));
    const cxd phase = std::exp(cxd(0.0, t * (logcb - logca)));
    return {flow, phase};
}

}  // namespace ccr::quasifree
