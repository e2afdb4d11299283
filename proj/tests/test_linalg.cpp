#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ccr/linalg.hpp"
#include "ccr/rng.hpp"

using namespace ccr;
using linalg::PartitionedMatrix;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix M(2, 2);
    M << cxd(a), cxd(b), cxd(c), cxd(d);
    return M;
}

}  // namespace

TEST_CASE("PartitionedMatrix blocks and symmetrization") {
    Matrix M(4, 4);
    M.setZero();
    M(0, 2) = cxd(1.0, 2.0);
    M(2, 0) = cxd(1.0, -2.0);
    M(0, 0) = 3.0;
    M(3, 3) = 4.0;
    PartitionedMatrix pm({2, 2}, M);
    REQUIRE(pm.side() == 4);
    REQUIRE(pm.block_count() == 2);
    REQUIRE(pm.block(0, 1)(0, 0) == cxd(1.0, 2.0));
    REQUIRE(pm.block(0, 1).adjoint() == pm.block(1, 0));

    SECTION("rejects asymmetric input") {
        Matrix bad = M;
        bad(1, 3) = cxd(0.5, 0.0);  // no mirror entry
        REQUIRE_THROWS_AS(PartitionedMatrix({2, 2}, bad), NotHermitian);
    }
    SECTION("rejects mismatched partition") {
        REQUIRE_THROWS_AS(PartitionedMatrix({2, 3}, M), DimensionMismatch);
    }
}

TEST_CASE("eig_hermitian on simple spectra") {
    SECTION("identity") {
        auto ed = linalg::eig_hermitian(Matrix::Identity(3, 3));
        for (int i = 0; i < 3; ++i) REQUIRE_THAT(ed.eigenvalues(i), Catch::Matchers::WithinAbs(1.0, 1e-14));
    }
    SECTION("diagonal") {
        Matrix M = Matrix::Zero(2, 2);
        M(0, 0) = 4.0;
        M(1, 1) = 5.0;
        auto ed = linalg::eig_hermitian(M);
        REQUIRE_THAT(ed.eigenvalues(0), Catch::Matchers::WithinAbs(4.0, 1e-14));
        REQUIRE_THAT(ed.eigenvalues(1), Catch::Matchers::WithinAbs(5.0, 1e-14));
    }
    SECTION("2x2 with analytic eigenvalues") {
        // [[2,1],[1,2]]: characteristic polynomial gives 1 and 3
        auto ed = linalg::eig_hermitian(mat2(2, 1, 1, 2));
        REQUIRE_THAT(ed.eigenvalues(0), Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(ed.eigenvalues(1), Catch::Matchers::WithinAbs(3.0, 1e-12));
    }
    SECTION("rejects non-Hermitian input") {
        REQUIRE_THROWS_AS(linalg::eig_hermitian(mat2(2, 1, 0, 2)), NotHermitian);
    }
}

TEST_CASE("eig_hermitian invariants") {
    rng::Stream s(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix M = rng::random_hermitian(s, 5);
        auto ed = linalg::eig_hermitian(M);
        const Matrix recon =
            ed.eigenvectors * ed.eigenvalues.asDiagonal() * ed.eigenvectors.adjoint();
        REQUIRE(linalg::opnorm(recon - M) <= 1e-10 * (1.0 + linalg::opnorm(M)));
        REQUIRE(linalg::opnorm(ed.eigenvectors.adjoint() * ed.eigenvectors -
                               Matrix::Identity(5, 5)) <= 1e-10);
        for (Index i = 1; i < ed.eigenvalues.size(); ++i)
            REQUIRE(ed.eigenvalues(i) >= ed.eigenvalues(i - 1));

        // spectrum invariant under unitary conjugation
        const Matrix U = rng::haar_unitary(s, 5);
        auto ed2 = linalg::eig_hermitian((U.adjoint() * M * U).eval(), 1e-9);
        REQUIRE((ed.eigenvalues - ed2.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("matrix_function basics") {
    rng::Stream s(3);
    const Matrix M = rng::random_hermitian(s, 4);

    SECTION("identity map reproduces the matrix") {
        const Matrix R = linalg::matrix_function(M, [](double x) { return x; });
        REQUIRE(linalg::max_abs(R - M) <= 1e-12 * (1.0 + linalg::max_abs(M)));
    }
    SECTION("exp of the zero matrix is the identity") {
        const Matrix R =
            linalg::matrix_function(Matrix::Zero(3, 3), [](double x) { return std::exp(x); });
        REQUIRE(linalg::max_abs(R - Matrix::Identity(3, 3)) <= 1e-14);
    }
    SECTION("(1+x)/x on diag(1,3)") {
        Matrix D = Matrix::Zero(2, 2);
        D(0, 0) = 1.0;
        D(1, 1) = 3.0;
        const Matrix R = linalg::matrix_function(D, [](double x) { return (1.0 + x) / x; });
        REQUIRE_THAT(R(0, 0).real(), Catch::Matchers::WithinAbs(2.0, 1e-14));
        REQUIRE_THAT(R(1, 1).real(), Catch::Matchers::WithinAbs(4.0 / 3.0, 1e-14));
    }
    SECTION("domain violation raises") {
        REQUIRE_THROWS_AS(
            linalg::matrix_function(
                M, [](double x) { return std::log(x); }, [](double x) { return x > 0.0; }, "log"),
            DomainError);
    }
    SECTION("functional calculus is multiplicative") {
        auto f = [](double x) { return x * x + 1.0; };
        auto g = [](double x) { return std::cos(x); };
        const Matrix Rfg =
            linalg::matrix_function(M, [&](double x) { return f(x) * g(x); });
        const Matrix Rf = linalg::matrix_function(M, f);
        const Matrix Rg = linalg::matrix_function(M, g);
        REQUIRE(linalg::opnorm(Rfg - Rf * Rg) <= 1e-9);
    }
}

TEST_CASE("imaginary_power") {
    rng::Stream s(5);
    Matrix G = rng::ginibre(s, 4, 4);
    const Matrix M = (G * G.adjoint() / 4.0 + 0.2 * Matrix::Identity(4, 4)).eval();
    const Matrix P = linalg::imaginary_power(M, 0.7);
    REQUIRE(linalg::opnorm(P.adjoint() * P - Matrix::Identity(4, 4)) <= 1e-12);
    REQUIRE(linalg::opnorm(linalg::imaginary_power(M, 0.0) - Matrix::Identity(4, 4)) <= 1e-14);
    REQUIRE_THROWS_AS(linalg::imaginary_power(Matrix::Zero(2, 2), 1.0), NotStrictlyPositive);
}

TEST_CASE("schur_complement") {
    SECTION("scalar example") {
        PartitionedMatrix M({1, 1}, mat2(2, 1, 1, 1));
        const Matrix ms = linalg::schur_complement(M, 1);  // M/S = 2 - 1*1*1
        REQUIRE_THAT(ms(0, 0).real(), Catch::Matchers::WithinAbs(1.0, 1e-14));
    }
    SECTION("block diagonal: M/S = P") {
        Matrix M = Matrix::Zero(4, 4);
        M.topLeftCorner(2, 2) = mat2(2, 1, 1, 2);
        M.bottomRightCorner(2, 2) = mat2(5, 0, 0, 7);
        PartitionedMatrix pm({2, 2}, M);
        REQUIRE(linalg::max_abs(linalg::schur_complement(pm, 1) - mat2(2, 1, 1, 2)) <= 1e-14);
        REQUIRE(linalg::max_abs(linalg::schur_complement(pm, 0) - mat2(5, 0, 0, 7)) <= 1e-14);
    }
    SECTION("det(M) = det(S) det(M/S) on random invertible instances") {
        rng::Stream s(17);
        for (int trial = 0; trial < 30; ++trial) {
            const Matrix W =
                rng::wishart_psd(s, 5) + 0.3 * Matrix::Identity(5, 5);
            PartitionedMatrix pm({2, 3}, W, 1e-9);
            const double detM = linalg::logdet_positive(W);
            const double detS = linalg::logdet_positive(pm.block(1, 1));
            const Matrix ms = linalg::schur_complement(pm, 1);
            const double detMS = linalg::logdet_positive(ms);
            REQUIRE_THAT(std::exp(detS + detMS - detM), Catch::Matchers::WithinAbs(1.0, 1e-8));
        }
    }
    SECTION("singular block rejected") {
        Matrix M = Matrix::Zero(2, 2);
        M(0, 0) = 1.0;
        PartitionedMatrix pm({1, 1}, M);
        REQUIRE_THROWS_AS(linalg::schur_complement(pm, 1), SingularBlock);
    }
}

TEST_CASE("partitioned_inverse") {
    SECTION("block diagonal") {
        Matrix M = Matrix::Zero(4, 4);
        M.topLeftCorner(2, 2) = mat2(2, 1, 1, 2);
        M.bottomRightCorner(2, 2) = mat2(5, 0, 0, 7);
        const auto inv = linalg::partitioned_inverse(PartitionedMatrix({2, 2}, M));
        REQUIRE(linalg::max_abs(inv.block(0, 1)) <= 1e-14);
        REQUIRE(linalg::max_abs(inv.entries() * M - Matrix::Identity(4, 4)) <= 1e-12);
    }
    SECTION("analytic 2x2") {
        const auto inv = linalg::partitioned_inverse(PartitionedMatrix({1, 1}, mat2(2, 1, 1, 1)));
        REQUIRE(linalg::max_abs(inv.entries() - mat2(1, -1, -1, 2)) <= 1e-12);
    }
    SECTION("agrees with dense inverse on random well-conditioned instances") {
        rng::Stream s(23);
        for (int trial = 0; trial < 100; ++trial) {
            const Matrix W = rng::wishart_psd(s, 4) + 0.5 * Matrix::Identity(4, 4);
            PartitionedMatrix pm({2, 2}, W, 1e-9);
            const auto inv = linalg::partitioned_inverse(pm);
            // eig-route inverse, independent of the Schur assembly
            const Matrix ref = linalg::matrix_function(W, [](double x) { return 1.0 / x; });
            REQUIRE(linalg::opnorm(inv.entries() - ref) <= 1e-9);
            REQUIRE(linalg::max_abs(W * inv.entries() - Matrix::Identity(4, 4)) <= 1e-9);
        }
    }
}

TEST_CASE("is_positive_semidefinite") {
    REQUIRE(linalg::is_positive_semidefinite(Matrix::Identity(3, 3)).positive);
    REQUIRE_THAT(linalg::is_positive_semidefinite(Matrix::Identity(3, 3)).lambda_min,
                 Catch::Matchers::WithinAbs(1.0, 1e-14));

    const auto v = linalg::is_positive_semidefinite(mat2(1, 2, 2, 1));
    REQUIRE_FALSE(v.positive);
    REQUIRE_THAT(v.lambda_min, Catch::Matchers::WithinAbs(-1.0, 1e-12));
}
