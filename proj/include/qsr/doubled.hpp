#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qsr/errors.hpp"

namespace qsr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Default absolute tolerance for structural residuals (conjugate-block
// symmetry, Hermiticity of constructed matrices, and similar checks that
// should hold to rounding error).
inline constexpr double kStructureTol = 1e-10;

// Default tolerance for pass/fail style checks on user-supplied data.
inline constexpr double kCheckTol = 1e-8;

// Largest entry magnitude of a matrix; 0 for an empty matrix.
double max_abs(const Matrix& a);

// J = diag(I_m, -I_m), the indefinite metric of size 2m.
Matrix jmat(Index m);

// Sigma = [[0, I_m], [I_m, 0]], the block-swap involution of size 2m.
Matrix sigma_mat(Index m);

// A 2n x 2m matrix of the form
//
//     R = [ R1   R2  ]
//         [ R2#  R1# ]      (# = entrywise conjugate)
//
// stored by its upper blocks R1, R2, so the symmetry R = Sigma R# Sigma
// holds by construction. This class of matrices is closed under sums,
// products, adjoints, inverses, and Schur complements, which is what lets
// every derived object below stay in the same form.
class DoubledMatrix {
public:
    // Throws DimensionMismatch if the blocks differ in shape and
    // InvalidParameter if any entry is non-finite.
    DoubledMatrix(Matrix upper_left, Matrix upper_right);

    static DoubledMatrix zero(Index half_rows, Index half_cols);
    static DoubledMatrix identity(Index half_n);

    Index half_rows() const noexcept { return r1_.rows(); }
    Index half_cols() const noexcept { return r1_.cols(); }

    const Matrix& upper_left() const noexcept { return r1_; }
    const Matrix& upper_right() const noexcept { return r2_; }

private:
    Matrix r1_;
    Matrix r2_;
};

// Full 2n x 2m form [[R1, R2], [R2#, R1#]].
Matrix expand(const DoubledMatrix& d);

struct StructureCheck {
    double residual = 0.0;  // max-entry norm of R - Sigma R# Sigma
    bool pass = false;
};

// Measures how far a full matrix is from conjugate-block symmetric.
// Throws DimensionMismatch if either dimension is odd or zero.
StructureCheck is_doubled(const Matrix& r, double tol = kStructureTol);

// Reads the upper blocks off a full matrix, first checking the symmetry
// residual. Throws StructureViolation (carrying the residual) beyond tol.
DoubledMatrix contract(const Matrix& r, double tol = kStructureTol);

}  // namespace qsr
