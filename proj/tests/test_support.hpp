#pragma once

// Shared deterministic generators and comparison helpers for the test suite.
// Everything is seeded explicitly so failures reproduce bit-for-bit.

#include <algorithm>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "qsr/qsystem.hpp"
#include "qsr/special_class.hpp"

namespace qsrtest {

using qsr::Complex;
using qsr::DoubledMatrix;
using qsr::Index;
using qsr::Matrix;

inline Complex rand_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return scale * Complex(u(rng), u(rng));
}

inline Matrix rand_matrix(std::mt19937_64& rng, Index rows, Index cols,
                          double scale = 1.0) {
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) a(i, j) = rand_complex(rng, scale);
    return a;
}

inline DoubledMatrix rand_doubled(std::mt19937_64& rng, Index n, Index m,
                                  double scale = 1.0) {
    return DoubledMatrix(rand_matrix(rng, n, m, scale),
                         rand_matrix(rng, n, m, scale));
}

// Hermitian and conjugate-block symmetric: (A + A')/2 of a doubled A.
inline DoubledMatrix rand_hermitian_doubled(std::mt19937_64& rng, Index n,
                                            double scale = 1.0) {
    const DoubledMatrix a = rand_doubled(rng, n, n, scale);
    const Matrix full = 0.5 * (expand(a) + expand(a).adjoint());
    return qsr::contract(full, 1e-14);
}

// Haar-ish unitary: QR of a random complex matrix with the phases of the
// triangular factor's diagonal absorbed, so the result is exactly unitary
// up to rounding and deterministic in the seed.
inline Matrix rand_unitary(std::mt19937_64& rng, Index m) {
    const Matrix a = rand_matrix(rng, m, m);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < m; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1, 0);
    }
    return q;
}

inline qsr::PhysicalParams rand_physical(std::mt19937_64& rng, Index n, Index m) {
    return qsr::PhysicalParams::canonical(rand_hermitian_doubled(rng, n),
                                          rand_doubled(rng, m, n),
                                          rand_unitary(rng, m));
}

// Generating data for the slow/fast family: Hermitian diagonal blocks,
// Mc forced to Mb', generic couplings. Draws with a badly conditioned fast
// response matrix D = i Md + (1/2) Nb' J Nb are rejected and redrawn so the
// reduction formulas stay numerically trustworthy in property suites.
inline qsr::SpecialClassParams rand_special(std::mt19937_64& rng, Index n1,
                                            Index n2, Index m) {
    const DoubledMatrix ma = rand_hermitian_doubled(rng, n1);
    const DoubledMatrix mb = rand_doubled(rng, n1, n2);
    const DoubledMatrix mc = qsr::contract(expand(mb).adjoint(), 1e-14);
    const DoubledMatrix na = rand_doubled(rng, m, n1);
    const Matrix s = rand_unitary(rng, m);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const DoubledMatrix md = rand_hermitian_doubled(rng, n2);
        const DoubledMatrix nb = rand_doubled(rng, m, n2);
        const Matrix nbf = expand(nb);
        const Matrix d = Complex(0, 1) * expand(md) +
                         0.5 * nbf.adjoint() * qsr::jmat(m) * nbf;
        Eigen::PartialPivLU<Matrix> lu(d);
        if (lu.rcond() >= 1e-2) {
            return qsr::SpecialClassParams(ma, mb, mc, md, na, nb, s);
        }
    }
    throw std::runtime_error("rand_special: rejection loop exhausted");
}

inline double diff(const Matrix& a, const Matrix& b) {
    return qsr::max_abs(a - b);
}

inline double diff(const DoubledMatrix& a, const DoubledMatrix& b) {
    return diff(expand(a), expand(b));
}

// Worst entrywise distance over the four system matrices.
inline double sys_diff(const qsr::QuantumLinearSystem& a,
                       const qsr::QuantumLinearSystem& b) {
    double worst = diff(a.F(), b.F());
    worst = std::max(worst, diff(a.G(), b.G()));
    worst = std::max(worst, diff(a.H(), b.H()));
    worst = std::max(worst, diff(a.K(), b.K()));
    return worst;
}

}  // namespace qsrtest
