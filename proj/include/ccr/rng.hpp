#pragma once

/*
 * Seeded random matrix generation.  The Gaussian sampler is a hand-rolled
 * Box-Muller on top of mt19937_64 so that a given seed produces the same
 * stream on every platform and standard library.
 */

#include <cmath>
#include <random>

#include "linalg.hpp"

namespace ccr::rng {

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    cxd cgaussian() {
        const double re = gaussian(), im = gaussian();
        return cxd(re, im) / std::sqrt(2.0);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Matrix ginibre(Stream& s, Index rows, Index cols) {
    Matrix G(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) G(i, j) = s.cgaussian();
    return G;
}

inline Matrix haar_unitary(Stream& s, Index n) {
    const Matrix G = ginibre(s, n, n);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < n; ++k) {
        const cxd d = R(k, k);
        Q.col(k) *= d / std::abs(d);
    }
    return Q;
}

// Wishart-style G G*/n; almost surely strictly positive definite.
inline Matrix wishart_psd(Stream& s, Index n) {
    const Matrix G = ginibre(s, n, n);
    return (G * G.adjoint() / static_cast<double>(n)).eval();
}

inline Matrix random_hermitian(Stream& s, Index n) {
    const Matrix G = ginibre(s, n, n);
    return (0.5 * (G + G.adjoint())).eval();
}

}  // namespace ccr::rng
