#pragma once

/*
 * Markov-triplet decision suite for quasi-free states.
 *
 * A tripartite quasi-free state with block matrix A is Markovian iff the
 * entropy increase is constant:
 *     S(123) - S(23) = S(12) - S(2).
 * The checks implemented here, in decreasing strength:
 *
 *   entropy_gap        S(12) + S(23) - S(123) - S(2); zero iff Markov,
 *                      nonnegative always (strong subadditivity).
 *   flow_check         K_A^{it} K_D^{-it} = K_B^{it} K_C^{-it} at sampled t,
 *                      with K_X = X(I+X)^{-1} and B, C, D the extension
 *                      matrices; equivalent to the Markov property.
 *   structural_detect  searches for the block-diagonal splitting
 *                      H2 = Ka + Kb that characterizes Markov triplets;
 *                      the authoritative structural criterion.
 *   bmc2_check         A^{-1}(I+A) D(I+D)^{-1} = B^{-1}(I+B) C(I+C)^{-1};
 *                      strictly weaker than the flow condition.
 *   felk_check         A13 = A12 A22^{-1} A23 and A13 = A12 (A22+I)^{-1} A23;
 *                      necessary conditions implied by bmc2.
 *   det_identity       det A det C / (det D det B) and the same with I+X;
 *                      both <= 1, both = 1 iff felk holds.
 *   classical_check    Markov condition of the classical Gaussian obtained
 *                      from commuting field operators: the (1,3) entry of
 *                      (I+2A)^{-1} vanishes.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fock.hpp"
#include "linalg.hpp"
#include "quasifree.hpp"
#include "rng.hpp"

namespace ccr::markov {

using linalg::PartitionedMatrix;

struct TripletPartition {
    Index d1, d2, d3;
    Index side() const { return d1 + d2 + d3; }
    std::vector<Index> dims() const { return {d1, d2, d3}; }
};

inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kStrictPositivityThreshold = 1e-12;

inline std::vector<double> default_t_samples() {
    return {0.5, 1.0, std::sqrt(2.0), M_PI};
}

namespace detail {

inline void require_partition(const PartitionedMatrix& A, const TripletPartition& part) {
    if (part.d1 <= 0 || part.d2 <= 0 || part.d3 <= 0)
        throw PartitionMismatch("triplet dimensions must be positive");
    if (A.side() != part.side())
        throw PartitionMismatch("matrix side " + std::to_string(A.side()) +
                                " does not match partition total " + std::to_string(part.side()));
}

inline Matrix blk(const PartitionedMatrix& A, const TripletPartition& p, int i, int j) {
    const Index off[3] = {0, p.d1, p.d1 + p.d2};
    const Index dim[3] = {p.d1, p.d2, p.d3};
    return A.entries().block(off[i], off[j], dim[i], dim[j]);
}

inline PartitionedMatrix assemble(const TripletPartition& p, const Matrix& full,
                                  double herm_tol = 1e-9) {
    return PartitionedMatrix(p.dims(), full, herm_tol);
}

}  // namespace detail

struct ExtensionTriple {
    PartitionedMatrix B, C, D;
};

// The extension matrices of the flow condition:
//   D = Diag(I, [A22 A23; A32 A33]),
//   B = Diag([A11 A12; A21 A22], I),
//   C = Diag(I, A22, I).
inline ExtensionTriple build_extensions(const PartitionedMatrix& A,
                                        const TripletPartition& part) {
    detail::require_partition(A, part);
    const Index n = part.side();
    Matrix D = Matrix::Identity(n, n), B = Matrix::Identity(n, n), C = Matrix::Identity(n, n);
    const Index o2 = part.d1, o3 = part.d1 + part.d2;
    D.block(o2, o2, part.d2, part.d2) = detail::blk(A, part, 1, 1);
    D.block(o2, o3, part.d2, part.d3) = detail::blk(A, part, 1, 2);
    D.block(o3, o2, part.d3, part.d2) = detail::blk(A, part, 2, 1);
    D.block(o3, o3, part.d3, part.d3) = detail::blk(A, part, 2, 2);
    B.block(0, 0, part.d1, part.d1) = detail::blk(A, part, 0, 0);
    B.block(0, o2, part.d1, part.d2) = detail::blk(A, part, 0, 1);
    B.block(o2, 0, part.d2, part.d1) = detail::blk(A, part, 1, 0);
    B.block(o2, o2, part.d2, part.d2) = detail::blk(A, part, 1, 1);
    C.block(o2, o2, part.d2, part.d2) = detail::blk(A, part, 1, 1);
    return {detail::assemble(part, B), detail::assemble(part, C), detail::assemble(part, D)};
}

// Strong-subadditivity deficiency S(12) + S(23) - S(123) - S(2) in nats;
// nonnegative, zero exactly on Markov triplets.
inline double entropy_gap(const PartitionedMatrix& A, const TripletPartition& part) {
    detail::require_partition(A, part);
    const PartitionedMatrix ap(part.dims(), A.entries(), 1e-9);
    const quasifree::QuasiFreeState s123{ap};
    const quasifree::QuasiFreeState s12{ap.principal({0, 1})};
    const quasifree::QuasiFreeState s23{ap.principal({1, 2})};
    const quasifree::QuasiFreeState s2{ap.principal({1})};
    return quasifree::entropy_closed_form(s12) + quasifree::entropy_closed_form(s23) -
           quasifree::entropy_closed_form(s123) - quasifree::entropy_closed_form(s2);
}

struct FlowCheck {
    bool pass;
    double max_deviation;
    std::vector<double> t_samples;
    std::vector<double> deviations;  // operator-norm deviation per sample
};

namespace detail {

// K_X^{it} with K_X = X(I+X)^{-1}; requires X strictly positive.
inline Matrix contraction_power(const Matrix& X, double t) {
    auto ed = linalg::eig_hermitian(X, 1e-9);
    if (ed.eigenvalues(0) <= kStrictPositivityThreshold)
        throw NotStrictlyPositive(ed.eigenvalues(0));
    Vector ph(ed.eigenvalues.size());
    for (Index i = 0; i < ph.size(); ++i) {
        const double mu = ed.eigenvalues(i) / (1.0 + ed.eigenvalues(i));
        ph(i) = std::exp(cxd(0.0, t * std::log(mu)));
    }
    return ed.eigenvectors * ph.asDiagonal() * ed.eigenvectors.adjoint();
}

}  // namespace detail

// Evaluates || A^{it}(I+A)^{-it} D^{-it}(I+D)^{it}
//             - B^{it}(I+B)^{-it} C^{-it}(I+C)^{it} ||  at each sample.
inline FlowCheck flow_check(const PartitionedMatrix& A, const TripletPartition& part,
                            std::vector<double> t_samples = default_t_samples(),
                            double tol = kDefaultTol) {
    detail::require_partition(A, part);
    const auto ext = build_extensions(A, part);
    FlowCheck result{true, 0.0, std::move(t_samples), {}};
    for (double t : result.t_samples) {
        const Matrix lhs = detail::contraction_power(A.entries(), t) *
                           detail::contraction_power(ext.D.entries(), -t);
        const Matrix rhs = detail::contraction_power(ext.B.entries(), t) *
                           detail::contraction_power(ext.C.entries(), -t);
        const double dev = linalg::opnorm(lhs - rhs);
        result.deviations.push_back(dev);
        result.max_deviation = std::max(result.max_deviation, dev);
    }
    result.pass = result.max_deviation <= tol;
    return result;
}

struct Bmc2Check {
    bool pass;
    double residual;
};

// A^{-1}(I+A) D(I+D)^{-1} = B^{-1}(I+B) C(I+C)^{-1}; the finite (t-free)
// condition, strictly weaker than the flow condition.
inline Bmc2Check bmc2_check(const PartitionedMatrix& A, const TripletPartition& part,
                            double tol = kDefaultTol) {
    detail::require_partition(A, part);
    const auto ext = build_extensions(A, part);
    auto grow = [](const Matrix& X) {
        auto ed = linalg::eig_hermitian(X, 1e-9);
        if (ed.eigenvalues(0) <= kStrictPositivityThreshold)
            throw NotStrictlyPositive(ed.eigenvalues(0));
        RealVector fl(ed.eigenvalues.size());
        for (Index i = 0; i < fl.size(); ++i) fl(i) = (1.0 + ed.eigenvalues(i)) / ed.eigenvalues(i);
        return (ed.eigenvectors * fl.asDiagonal() * ed.eigenvectors.adjoint()).eval();
    };
    auto shrink = [](const Matrix& X) {
        return linalg::matrix_function(X, [](double x) { return x / (1.0 + x); });
    };
    const Matrix lhs = grow(A.entries()) * shrink(ext.D.entries());
    const Matrix rhs = grow(ext.B.entries()) * shrink(ext.C.entries());
    const double residual = linalg::opnorm(lhs - rhs);
    return {residual <= tol, residual};
}

struct FelkCheck {
    bool pass;
    double r1;            // ||A13 - A12 A22^{-1} A23||
    double r2;            // ||A13 - A12 (A22+I)^{-1} A23||
    double inv13_norm;    // ||(A^{-1})_{13}||
    double invI13_norm;   // ||((A+I)^{-1})_{13}||
};

// The two necessary block conditions, plus the equivalent statement that
// the (1,3) blocks of A^{-1} and (A+I)^{-1} vanish.
inline FelkCheck felk_check(const PartitionedMatrix& A, const TripletPartition& part,
                            double tol = kDefaultTol) {
    detail::require_partition(A, part);
    const Matrix A12 = detail::blk(A, part, 0, 1), A13 = detail::blk(A, part, 0, 2),
                 A22 = detail::blk(A, part, 1, 1), A23 = detail::blk(A, part, 1, 2);
    const Matrix A22inv = linalg::detail::guarded_inverse(A22, 1e12);
    const Matrix A22Iinv =
        linalg::detail::guarded_inverse(A22 + Matrix::Identity(part.d2, part.d2), 1e12);
    const double r1 = linalg::opnorm(A13 - A12 * A22inv * A23);
    const double r2 = linalg::opnorm(A13 - A12 * A22Iinv * A23);

    auto corner13 = [&part](const Matrix& M) {
        Eigen::FullPivLU<Matrix> lu(M);
        if (!lu.isInvertible()) throw SingularMatrix("matrix not invertible");
        const Matrix inv = lu.inverse();
        return linalg::opnorm(inv.block(0, part.d1 + part.d2, part.d1, part.d3));
    };
    const double inv13 = corner13(A.entries());
    const double invI13 = corner13(A.entries() + Matrix::Identity(part.side(), part.side()));
    return {r1 <= tol && r2 <= tol, r1, r2, inv13, invI13};
}

struct Splitting {
    Matrix projection;  // P = Diag(I_{d1}, P_{Ka}, 0_{d3})
    Index dim_ka, dim_kb;
};

namespace detail {

// Orthonormal basis of the column span of M, rank-truncated at
// rank_tol * sigma_max.
inline Matrix orth(const Matrix& M, double rank_tol = 1e-10) {
    if (M.cols() == 0) return Matrix(M.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return Matrix(M.rows(), 0);
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > rank_tol * sv(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace detail

// Searches for the splitting H2 = Ka + Kb that puts A in block-diagonal
// Markov form:
//   (1) A13 must vanish;
//   (2) Kb is the smallest A22-invariant subspace containing range(A23),
//       obtained by Krylov closure (robust under degenerate A22 spectra);
//   (3) A12 must vanish on Kb.
// On success returns the projection P = Diag(I, P_Ka, 0) with PA = AP.
inline std::optional<Splitting> structural_detect(const PartitionedMatrix& A,
                                                  const TripletPartition& part,
                                                  double tol = kDefaultTol) {
    detail::require_partition(A, part);
    const Matrix A12 = detail::blk(A, part, 0, 1), A13 = detail::blk(A, part, 0, 2),
                 A22 = detail::blk(A, part, 1, 1), A23 = detail::blk(A, part, 1, 2);
    if (linalg::opnorm(A13) > tol) return std::nullopt;

    Matrix V = detail::orth(A23);
    while (V.cols() > 0) {
        Matrix grown(part.d2, 2 * V.cols());
        grown << V, A22 * V;
        Matrix Vn = detail::orth(grown);
        if (Vn.cols() == V.cols()) {
            V = std::move(Vn);
            break;
        }
        V = std::move(Vn);
    }
    const Matrix P_kb = V.cols() > 0 ? Matrix(V * V.adjoint())
                                     : Matrix(Matrix::Zero(part.d2, part.d2));
    if (linalg::opnorm(A12 * P_kb) > tol) return std::nullopt;

    Matrix P = Matrix::Zero(part.side(), part.side());
    P.topLeftCorner(part.d1, part.d1) = Matrix::Identity(part.d1, part.d1);
    P.block(part.d1, part.d1, part.d2, part.d2) = Matrix::Identity(part.d2, part.d2) - P_kb;
    if (linalg::opnorm(P * A.entries() - A.entries() * P) > tol) return std::nullopt;
    return Splitting{P, part.d2 - V.cols(), V.cols()};
}

struct DetIdentity {
    double lhs;  // det A det C / (det D det B)
    double rhs;  // det(I+A) det(I+C) / (det(I+D) det(I+B))
};

// Determinant identity obtained from the flow condition; both sides are
// at most 1 and equal 1 exactly when the felk conditions hold.
inline DetIdentity det_identity(const PartitionedMatrix& A, const TripletPartition& part) {
    detail::require_partition(A, part);
    const auto ext = build_extensions(A, part);
    const Matrix I = Matrix::Identity(part.side(), part.side());
    const double lhs = std::exp(
        linalg::logdet_positive(A.entries()) + linalg::logdet_positive(ext.C.entries()) -
        linalg::logdet_positive(ext.D.entries()) - linalg::logdet_positive(ext.B.entries()));
    const double rhs = std::exp(
        linalg::logdet_positive(A.entries() + I) + linalg::logdet_positive(ext.C.entries() + I) -
        linalg::logdet_positive(ext.D.entries() + I) -
        linalg::logdet_positive(ext.B.entries() + I));
    return {lhs, rhs};
}

struct ClassicalCheck {
    bool pass;
    double residual;          // ||A'13 - A'12 A'22^{-1} A'23|| with A' = I + 2A
    bool independence_pass;   // only meaningful when a structural splitting exists
    double a13_norm;
};

// Markov condition of the classical Gaussian covariance I + 2A coming from
// commuting field operators; when the quantum triplet is Markov (structural
// splitting found), the first and third marginals are independent: A13 = 0.
inline ClassicalCheck classical_check(const PartitionedMatrix& A, const TripletPartition& part,
                                      double tol = kDefaultTol) {
    detail::require_partition(A, part);
    const Matrix Ap = Matrix::Identity(part.side(), part.side()) + 2.0 * A.entries();
    const PartitionedMatrix apm(part.dims(), Ap, 1e-9);
    const Matrix B12 = detail::blk(apm, part, 0, 1), B13 = detail::blk(apm, part, 0, 2),
                 B22 = detail::blk(apm, part, 1, 1), B23 = detail::blk(apm, part, 1, 2);
    const Matrix B22inv = linalg::detail::guarded_inverse(B22, 1e12);
    const double residual = linalg::opnorm(B13 - B12 * B22inv * B23);
    const double a13 = linalg::opnorm(detail::blk(A, part, 0, 2));
    return {residual <= tol, residual, a13 <= tol, a13};
}

enum class InstanceKind { Markov, Random, Counterexample };

// The 6x6 matrix that satisfies the felk conditions but is not Markov.
// Entries are small rationals, rounded once to double.
inline PartitionedMatrix counterexample_matrix() {
    Matrix A = Matrix::Zero(6, 6);
    auto set = [&A](int i, int j, double v) {
        A(i, j) = v;
        A(j, i) = v;
    };
    A(0, 0) = 4.0;
    A(1, 1) = 5.0;
    A(2, 2) = 6.0;
    A(3, 3) = 3.0;
    A(4, 4) = 3.0;
    A(5, 5) = 1.0;
    // A12
    set(0, 2, 1.0);
    set(0, 3, 1.0);
    set(1, 2, -2.0 / 7.0);
    set(1, 3, -2.0 / 7.0);
    // A13
    set(0, 4, 1.0 / 14.0);
    set(0, 5, 1.0 / 14.0);
    set(1, 4, -1.0 / 49.0);
    set(1, 5, -1.0 / 49.0);
    // A23
    set(2, 4, 1.0);
    set(2, 5, 1.0);
    set(3, 4, -2.0 / 7.0);
    set(3, 5, -2.0 / 7.0);
    return PartitionedMatrix({2, 2, 2}, A);
}

// Seeded instance generator.
//   Markov:         random blocks in the block-diagonal Markov pattern over a
//                   random split d2 = ka + kb, padded to strict positivity,
//                   then conjugated by a random Diag(U1, U2, U3) unitary.
//   Random:         Wishart G G*/n, generically far from Markov.
//   Counterexample: the matrix above (dims must be (2,2,2)).
inline PartitionedMatrix gen_instance(InstanceKind kind, const TripletPartition& part,
                                      std::uint64_t seed) {
    if (kind == InstanceKind::Counterexample) {
        if (part.d1 != 2 || part.d2 != 2 || part.d3 != 2)
            throw PartitionMismatch("the counterexample is 6x6 with partition (2,2,2)");
        return counterexample_matrix();
    }
    if (part.d1 <= 0 || part.d2 <= 0 || part.d3 <= 0)
        throw DimsTooSmall("triplet dimensions must be positive");
    rng::Stream stream(seed);
    const Index n = part.side();
    if (kind == InstanceKind::Random)
        return PartitionedMatrix(part.dims(), rng::wishart_psd(stream, n), 1e-9);

    if (part.d2 < 2)
        throw DimsTooSmall("kind=markov needs d2 >= 2 for a nontrivial Ka/Kb split");
    const Index ka =
        1 + static_cast<Index>(stream.uniform() * static_cast<double>(part.d2 - 1));
    const Index kb = part.d2 - ka;
    Matrix A = Matrix::Zero(n, n);
    const Index o2 = part.d1, o3 = part.d1 + part.d2;
    A.block(0, 0, part.d1, part.d1) = rng::wishart_psd(stream, part.d1);
    A.block(o2, o2, ka, ka) = rng::wishart_psd(stream, ka);
    A.block(o2 + ka, o2 + ka, kb, kb) = rng::wishart_psd(stream, kb);
    A.block(o3, o3, part.d3, part.d3) = rng::wishart_psd(stream, part.d3);
    const Matrix a = rng::ginibre(stream, part.d1, ka);
    const Matrix b = rng::ginibre(stream, kb, part.d3);
    A.block(0, o2, part.d1, ka) = a;
    A.block(o2, 0, ka, part.d1) = a.adjoint();
    A.block(o2 + ka, o3, kb, part.d3) = b;
    A.block(o3, o2 + ka, part.d3, kb) = b.adjoint();
    const double lmin = linalg::eig_hermitian(A, 1e-9).eigenvalues(0);
    if (lmin < 0.05)
        A += (std::abs(lmin) + 0.1) * Matrix::Identity(n, n);
    Matrix U = Matrix::Zero(n, n);
    U.block(0, 0, part.d1, part.d1) = rng::haar_unitary(stream, part.d1);
    U.block(o2, o2, part.d2, part.d2) = rng::haar_unitary(stream, part.d2);
    U.block(o3, o3, part.d3, part.d3) = rng::haar_unitary(stream, part.d3);
    return PartitionedMatrix(part.dims(), U.adjoint() * A * U, 1e-9);
}

// Aggregated verdicts of every criterion on one instance.  Criteria that
// need strict positivity are marked inapplicable instead of failing when
// the spectrum touches zero.
struct MarkovReport {
    double tol = kDefaultTol;
    bool psd = false;
    double lambda_min = 0.0;

    double gap = 0.0;

    bool flow_applicable = false;
    bool flow_pass = false;
    double flow_max_deviation = 0.0;
    std::vector<double> t_samples;
    std::vector<double> flow_deviations;
    std::string flow_reason;

    bool bmc2_applicable = false;
    bool bmc2_pass = false;
    double bmc2_residual = 0.0;
    std::string bmc2_reason;

    bool felk_applicable = false;
    bool felk_pass = false;
    double felk_r1 = 0.0, felk_r2 = 0.0;
    double inv13_norm = 0.0, invI13_norm = 0.0;
    std::string felk_reason;

    bool structural_found = false;
    Index dim_ka = 0, dim_kb = 0;
    Matrix projection;

    bool det_applicable = false;
    double det_lhs = 0.0, det_rhs = 0.0;
    std::string det_reason;

    bool classical_pass = false;
    double classical_residual = 0.0;
    bool independence_pass = false;
    double a13_norm = 0.0;

    std::string weyl_sign_convention;
};

struct AnalyzeOptions {
    double tol = kDefaultTol;
    std::vector<double> t_samples = default_t_samples();
};

// Runs every criterion; throws NotPositive only when A fails the PSD
// verdict outright.
inline MarkovReport analyze(const PartitionedMatrix& A, const TripletPartition& part,
                            const AnalyzeOptions& opts = {}) {
    detail::require_partition(A, part);
    MarkovReport rep;
    rep.tol = opts.tol;
    const auto verdict = linalg::is_positive_semidefinite(A.entries());
    rep.psd = verdict.positive;
    rep.lambda_min = verdict.lambda_min;
    if (!rep.psd) throw NotPositive(rep.lambda_min);

    rep.gap = entropy_gap(A, part);

    try {
        auto fc = flow_check(A, part, opts.t_samples, opts.tol);
        rep.flow_applicable = true;
        rep.flow_pass = fc.pass;
        rep.flow_max_deviation = fc.max_deviation;
        rep.t_samples = fc.t_samples;
        rep.flow_deviations = fc.deviations;
    } catch (const NotStrictlyPositive& e) {
        rep.flow_reason = e.what();
        rep.t_samples = opts.t_samples;
    }

    try {
        auto bc = bmc2_check(A, part, opts.tol);
        rep.bmc2_applicable = true;
        rep.bmc2_pass = bc.pass;
        rep.bmc2_residual = bc.residual;
    } catch (const NotStrictlyPositive& e) {
        rep.bmc2_reason = e.what();
    }

    try {
        auto fe = felk_check(A, part, opts.tol);
        rep.felk_applicable = true;
        rep.felk_pass = fe.pass;
        rep.felk_r1 = fe.r1;
        rep.felk_r2 = fe.r2;
        rep.inv13_norm = fe.inv13_norm;
        rep.invI13_norm = fe.invI13_norm;
    } catch (const Error& e) {
        rep.felk_reason = e.what();
    }

    if (auto split = structural_detect(A, part, opts.tol)) {
        rep.structural_found = true;
        rep.dim_ka = split->dim_ka;
        rep.dim_kb = split->dim_kb;
        rep.projection = split->projection;
    }

    try {
        auto di = det_identity(A, part);
        rep.det_applicable = true;
        rep.det_lhs = di.lhs;
        rep.det_rhs = di.rhs;
    } catch (const Error& e) {
        rep.det_reason = e.what();
    }

    auto cc = classical_check(A, part, opts.tol);
    rep.classical_pass = cc.pass;
    rep.classical_residual = cc.residual;
    rep.independence_pass = cc.independence_pass;
    rep.a13_norm = cc.a13_norm;

    rep.weyl_sign_convention = fock::weyl_sign_convention();
    return rep;
}

}  // namespace ccr::markov
