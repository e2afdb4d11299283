#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ccr/specfun.hpp"

using namespace ccr;
using namespace ccr::specfun;

namespace {

// Gauss-Hermite nodes/weights for the weight e^{-x^2} (Golub-Welsch on the
// Jacobi matrix), order fixed at 200: exact for polynomial degree <= 399.
struct GaussHermite {
    std::vector<double> nodes, weights;
};

GaussHermite gauss_hermite_200() {
    const int n = 200;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(k / 2.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermite gh;
    for (int i = 0; i < n; ++i) {
        gh.nodes.push_back(es.eigenvalues()(i));
        const double v0 = es.eigenvectors()(0, i);
        gh.weights.push_back(std::sqrt(M_PI) * v0 * v0);
    }
    return gh;
}

// Single-mode truncated ladder plus eigendecomposition-based exponential,
// written out directly so the oracle shares nothing with the library path.
cxd weyl_element_truncated(int m, int n, cxd z, int cutoff) {
    const int dim = cutoff + 1;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
    const Eigen::MatrixXcd gen = z * a - std::conj(z) * a.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cxd(0.0, -1.0) * gen);
    Eigen::VectorXcd ph(dim);
    for (int k = 0; k < dim; ++k) ph(k) = std::exp(cxd(0.0, es.eigenvalues()(k)));
    const Eigen::MatrixXcd W =
        es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    return W(m, n);
}

}  // namespace

TEST_CASE("hermite_poly low-degree values") {
    REQUIRE(hermite_poly(0, -3.7) == 1.0);
    REQUIRE(hermite_poly(0, 12.0) == 1.0);
    REQUIRE_THAT(hermite_poly(1, 1.5), Catch::Matchers::WithinAbs(3.0, 1e-14));   // 2x
    REQUIRE_THAT(hermite_poly(2, 1.0), Catch::Matchers::WithinAbs(2.0, 1e-14));   // 4x^2-2
    REQUIRE_THROWS_AS(hermite_poly(201, 0.5), DegreeTooLarge);
}

TEST_CASE("hermite recursion residual") {
    // H_{n+1} - 2x H_n + 2n H_{n-1} = 0, relative to the table magnitude
    for (int i = 0; i < 20; ++i) {
        const double x = -5.0 + 10.0 * i / 19.0;
        const auto h = hermite_values(100, x);
        for (int n = 1; n < 100; ++n) {
            const double res = h[n + 1] - 2.0 * x * h[n] + 2.0 * n * h[n - 1];
            const double scale = std::max({std::abs(h[n + 1]), std::abs(h[n]), 1.0});
            REQUIRE(std::abs(res) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("hermite generating function") {
    // sum t^n H_n(x) / n! = exp(2xt - t^2)
    const double t = 0.3, x = 0.7;
    const auto h = hermite_values(40, x);
    double sum = 0.0, coeff = 1.0;
    for (int n = 0; n <= 40; ++n) {
        sum += coeff * h[n];
        coeff *= t / (n + 1.0);
    }
    REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(std::exp(2.0 * x * t - t * t), 1e-10));
}

TEST_CASE("hermite_function normalization and orthonormality") {
    REQUIRE_THAT(hermite_function(0, 0.0),
                 Catch::Matchers::WithinAbs(std::pow(M_PI, -0.25), 1e-14));
    // agreement with the unnormalized polynomial route at small degree
    for (int n = 0; n <= 12; ++n) {
        const double x = 0.8;
        const double direct = std::exp(-0.5 * x * x) * hermite_poly(n, x) /
                              std::sqrt(std::exp(log_factorial(n)) * std::pow(2.0, n) *
                                        std::sqrt(M_PI));
        REQUIRE_THAT(hermite_function(n, x), Catch::Matchers::WithinAbs(direct, 1e-12));
    }

    const auto gh = gauss_hermite_200();
    for (int m = 0; m <= 10; ++m) {
        for (int n = m; n <= 10; ++n) {
            double acc = 0.0;
            for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
                const double x = gh.nodes[i];
                // phi_m phi_n e^{x^2} is a polynomial: quadrature is exact
                acc += gh.weights[i] * hermite_function(m, x) * hermite_function(n, x) *
                       std::exp(x * x);
            }
            REQUIRE_THAT(acc, Catch::Matchers::WithinAbs(m == n ? 1.0 : 0.0, 1e-8));
        }
    }
}

TEST_CASE("laguerre values and generating function") {
    REQUIRE(laguerre_assoc(0, 0, 5.3) == 1.0);
    REQUIRE(laguerre_assoc(0, 4, -1.2) == 1.0);
    REQUIRE_THAT(laguerre_assoc(1, 0, 2.0), Catch::Matchers::WithinAbs(-1.0, 1e-14));  // 1-x

    SECTION("sum form agrees with the recursion where both apply") {
        // the alternating sum cancels terms of size ~1e5 at n = 20, x = 4,
        // so a few times 1e-10 is the honest agreement level there
        for (int n = 1; n <= 20; ++n)
            for (int alpha : {0, 1, 3})
                for (double x : {0.3, 1.5, 4.0}) {
                    const double a = laguerre_sum_form(n, alpha, x);
                    const double b = laguerre_recursion(n, alpha, x);
                    REQUIRE_THAT(a, Catch::Matchers::WithinRel(b, 5e-9) ||
                                        Catch::Matchers::WithinAbs(b, 5e-9));
                }
    }

    SECTION("generating function sum_n t^n L_n(x) = (1-t)^{-1} exp(-xt/(1-t))") {
        const double t = 0.4, x = 1.0;
        double sum = 0.0, tn = 1.0;
        for (int n = 0; n <= 60; ++n) {
            sum += tn * laguerre_assoc(n, 0, x);
            tn *= t;
        }
        const double expect = std::exp(-x * t / (1.0 - t)) / (1.0 - t);
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(expect, 1e-9));
    }
}

TEST_CASE("weyl_matrix_element closed form") {
    SECTION("vacuum element e^{-|z|^2/2}") {
        for (cxd z : {cxd(0.5, 0.0), cxd(0.0, 0.8), cxd(-0.3, 0.4)})
            REQUIRE_THAT(std::abs(weyl_matrix_element(0, 0, z) -
                                  std::exp(-0.5 * std::norm(z))),
                         Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
    SECTION("identity at z = 0, exactly") {
        for (int m = 0; m <= 8; ++m)
            for (int n = 0; n <= 8; ++n)
                REQUIRE(weyl_matrix_element(m, n, cxd(0.0, 0.0)) ==
                        (m == n ? cxd(1.0, 0.0) : cxd(0.0, 0.0)));
    }
    SECTION("bounded by 1 (unitary between unit vectors)") {
        for (int m = 0; m <= 20; m += 4)
            for (int n = 0; n <= 20; n += 3)
                for (cxd z : {cxd(0.9, 0.0), cxd(0.2, -0.7), cxd(-1.0, 1.0)})
                    REQUIRE(std::abs(weyl_matrix_element(m, n, z)) <= 1.0 + 1e-12);
    }
    SECTION("conjugation symmetry") {
        for (int m = 0; m <= 12; m += 2)
            for (int n = 0; n <= 12; n += 3)
                for (cxd z : {cxd(0.4, 0.3), cxd(-0.2, 0.6)}) {
                    const cxd lhs = weyl_matrix_element(m, n, z);
                    const cxd rhs = std::conj(weyl_matrix_element(n, m, -z));
                    REQUIRE(std::abs(lhs - rhs) <= 1e-12);
                }
    }
    SECTION("against the truncated-exponential oracle") {
        const cxd z(0.0, 0.4);
        const cxd oracle = weyl_element_truncated(2, 5, z, 60);
        REQUIRE(std::abs(weyl_matrix_element(2, 5, z) - oracle) <= 1e-8);
        // frozen regression value from the same oracle
        REQUIRE(std::abs(weyl_matrix_element(2, 5, z) - cxd(0.0, -0.07026716525858537)) <= 1e-13);
    }
    SECTION("thermal diagonal sum") {
        // sum_n mu^n (1 - mu) <phi_n, W(z) phi_n>; the elements are bounded
        // by 1, so truncating the geometric sum at n = 100 discards at most
        // mu^101/(1 - mu) ~ 8e-31, far below the tolerance
        const double mu = 0.5;
        const cxd z(0.3, 0.2);
        cxd sum = 0.0;
        double w = 1.0 - mu;
        for (int n = 0; n <= 100; ++n) {
            sum += w * weyl_matrix_element(n, n, z);
            w *= mu;
        }
        const double expect = std::exp(-0.5 * std::norm(z) * (1.0 + mu) / (1.0 - mu));
        REQUIRE(std::abs(sum - expect) <= 1e-9);
    }
    SECTION("degree guard") {
        REQUIRE_THROWS_AS(weyl_matrix_element(101, 2, cxd(0.1, 0.0)), DegreeTooLarge);
    }
}

TEST_CASE("exponential_vector_coeffs") {
    SECTION("vacuum at z = 0") {
        const auto c = exponential_vector_coeffs(cxd(0.0, 0.0), 5);
        REQUIRE(c[0] == cxd(1.0, 0.0));
        for (int n = 1; n <= 5; ++n) REQUIRE(c[n] == cxd(0.0, 0.0));
    }
    SECTION("squared norm is e^{|z|^2}") {
        const auto c = exponential_vector_coeffs(cxd(1.0, 0.0), 50);
        double norm2 = 0.0;
        for (const auto& v : c) norm2 += std::norm(v);
        REQUIRE_THAT(norm2, Catch::Matchers::WithinAbs(std::exp(1.0), 1e-12));
    }
    SECTION("pointwise identity against the Gaussian closed form") {
        const double x = 0.5;
        const cxd z(0.3, 0.0);
        const auto c = exponential_vector_coeffs(z, 50);
        cxd sum = 0.0;
        for (int n = 0; n <= 50; ++n) sum += c[n] * hermite_function(n, x);
        const cxd expect = std::pow(M_PI, -0.25) *
                           std::exp(-(z * z + x * x) / 2.0) *
                           std::exp(z * x * std::sqrt(2.0));
        REQUIRE(std::abs(sum - expect) <= 1e-10);
    }
}
