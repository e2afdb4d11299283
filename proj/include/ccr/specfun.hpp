#pragma once

/*
 * Hermite and Laguerre special functions, exponential vectors, and the
 * closed-form matrix elements <phi_m, W(z) phi_n> of the displacement
 * unitaries between Hermite functions.
 *
 * Factorial ratios are taken in log space (table of log-factorials up to
 * 300), so the closed forms stay finite well past the point where n!
 * overflows a double.
 */

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace ccr::specfun {

using cxd = std::complex<double>;

inline constexpr int kMaxDegree = 200;
inline constexpr int kMaxWeylIndex = 100;
inline constexpr int kLogFactorialTableSize = 301;

inline double log_factorial(int n) {
    if (n < 0 || n >= kLogFactorialTableSize)
        throw DegreeTooLarge("log_factorial supports 0 <= n <= 300, got " + std::to_string(n));
    static const std::array<double, kLogFactorialTableSize> table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        t[0] = 0.0;
        for (int k = 1; k < kLogFactorialTableSize; ++k) t[k] = t[k - 1] + std::log(double(k));
        return t;
    }();
    return table[n];
}

// H_0..H_n at x via the three-term recursion
// H_{k+1}(x) = 2x H_k(x) - 2k H_{k-1}(x).
inline std::vector<double> hermite_values(int n, double x) {
    if (n < 0 || n > kMaxDegree)
        throw DegreeTooLarge("Hermite degree must be in [0, 200], got " + std::to_string(n));
    std::vector<double> h(n + 1);
    h[0] = 1.0;
    if (n >= 1) h[1] = 2.0 * x;
    for (int k = 1; k < n; ++k) h[k + 1] = 2.0 * x * h[k] - 2.0 * k * h[k - 1];
    return h;
}

inline double hermite_poly(int n, double x) { return hermite_values(n, x).back(); }

// Normalized Hermite functions phi_n(x) = e^{-x^2/2} H_n(x) / sqrt(2^n n! sqrt(pi)),
// evaluated by the stable normalized recursion
// phi_{k+1} = (sqrt(2) x phi_k - sqrt(k) phi_{k-1}) / sqrt(k+1).
inline std::vector<double> hermite_function_values(int n, double x) {
    if (n < 0 || n > kMaxDegree)
        throw DegreeTooLarge("Hermite degree must be in [0, 200], got " + std::to_string(n));
    std::vector<double> phi(n + 1);
    phi[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (n >= 1) phi[1] = std::sqrt(2.0) * x * phi[0];
    for (int k = 1; k < n; ++k)
        phi[k + 1] = (std::sqrt(2.0) * x * phi[k] - std::sqrt(double(k)) * phi[k - 1]) /
                     std::sqrt(double(k + 1));
    return phi;
}

inline double hermite_function(int n, double x) { return hermite_function_values(n, x).back(); }

// Associated Laguerre polynomial by the finite alternating sum
// L_n^a(x) = sum_k (-1)^k (n+a)! / (k! (n-k)! (a+k)!) x^k.
// Kept for low degrees where cancellation is harmless; cross-checked
// against the recursion in the tests.
inline double laguerre_sum_form(int n, int alpha, double x) {
    if (n < 0 || n > kMaxDegree)
        throw DegreeTooLarge("Laguerre degree must be in [0, 200], got " + std::to_string(n));
    double acc = 0.0;
    double xk = 1.0;  // x^k
    for (int k = 0; k <= n; ++k) {
        const double lc = log_factorial(n + alpha) - log_factorial(k) - log_factorial(n - k) -
                          log_factorial(alpha + k);
        acc += (k % 2 ? -1.0 : 1.0) * std::exp(lc) * xk;
        xk *= x;
    }
    return acc;
}

// Stable three-term recursion in n:
// (k+1) L_{k+1}^a = (2k + 1 + a - x) L_k^a - (k + a) L_{k-1}^a.
inline double laguerre_recursion(int n, int alpha, double x) {
    if (n < 0 || n > kMaxDegree)
        throw DegreeTooLarge("Laguerre degree must be in [0, 200], got " + std::to_string(n));
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

// The alternating sum cancels badly for large n, so switch to the
// recursion beyond degree 20.
inline double laguerre_assoc(int n, int alpha, double x) {
    if (alpha <= -1) throw DomainError("Laguerre alpha must be an integer > -1");
    return n <= 20 ? laguerre_sum_form(n, alpha, x) : laguerre_recursion(n, alpha, x);
}

namespace detail {
inline cxd ipow(cxd z, int k) {
    cxd r(1.0, 0.0);
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}
}  // namespace detail

// <phi_m, W(z) phi_n> with W(z) = exp(z a - conj(z) a+).  For n >= m this is
// e^{-|z|^2/2} sqrt(m!/n!) z^{n-m} L_m^{n-m}(|z|^2); the other triangle follows
// from <phi_m, W(z) phi_n> = conj(<phi_n, W(-z) phi_m>).
inline cxd weyl_matrix_element(int m, int n, cxd z) {
    if (m < 0 || n < 0 || m > kMaxWeylIndex || n > kMaxWeylIndex)
        throw DegreeTooLarge("weyl_matrix_element supports indices in [0, 100]");
    if (m > n) return std::conj(weyl_matrix_element(n, m, -z));
    const double az2 = std::norm(z);
    const double ratio = std::exp(0.5 * (log_factorial(m) - log_factorial(n)));
    return std::exp(-0.5 * az2) * ratio * detail::ipow(z, n - m) *
           laguerre_assoc(m, n - m, az2);
}

// Coefficients of the exponential vector e(z) = sum_n z^n / sqrt(n!) phi_n
// up to index N.  ||e(z)||^2 = e^{|z|^2}.
inline std::vector<cxd> exponential_vector_coeffs(cxd z, int N) {
    if (N < 0) throw DomainError("cutoff must be nonnegative");
    std::vector<cxd> c(N + 1);
    c[0] = 1.0;
    for (int n = 1; n <= N; ++n) c[n] = c[n - 1] * z / std::sqrt(double(n));
    return c;
}

}  // namespace ccr::specfun
