#include "qsr/doubled.hpp"

#include <utility>

namespace qsr {

double max_abs(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

Matrix jmat(Index m) {
    if (m < 1) throw InvalidParameter("jmat: block size must be positive");
    Matrix j = Matrix::Zero(2 * m, 2 * m);
    j.topLeftCorner(m, m) = Matrix::Identity(m, m);
    j.bottomRightCorner(m, m) = -Matrix::Identity(m, m);
    return j;
}

Matrix sigma_mat(Index m) {
    if (m < 1) throw InvalidParameter("sigma_mat: block size must be positive");
    Matrix s = Matrix::Zero(2 * m, 2 * m);
    s.topRightCorner(m, m) = Matrix::Identity(m, m);
    s.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
    return s;
}

DoubledMatrix::DoubledMatrix(Matrix upper_left, Matrix upper_right)
    : r1_(std::move(upper_left)), r2_(std::move(upper_right)) {
    if (r1_.rows() != r2_.rows() || r1_.cols() != r2_.cols()) {
        throw DimensionMismatch("DoubledMatrix: upper blocks must have equal shapes");
    }
    if (r1_.rows() < 1 || r1_.cols() < 1) {
        throw DimensionMismatch("DoubledMatrix: blocks must be non-empty");
    }
    if (!r1_.allFinite() || !r2_.allFinite()) {
        throw InvalidParameter("DoubledMatrix: entries must be finite");
    }
}

DoubledMatrix DoubledMatrix::zero(Index half_rows, Index half_cols) {
    return DoubledMatrix(Matrix::Zero(half_rows, half_cols),
                         Matrix::Zero(half_rows, half_cols));
}

DoubledMatrix DoubledMatrix::identity(Index half_n) {
    return DoubledMatrix(Matrix::Identity(half_n, half_n),
                         Matrix::Zero(half_n, half_n));
}

Matrix expand(const DoubledMatrix& d) {
    const Index n = d.half_rows();
    const Index m = d.half_cols();
    Matrix r(2 * n, 2 * m);
    r.topLeftCorner(n, m) = d.upper_left();
    r.topRightCorner(n, m) = d.upper_right();
    r.bottomLeftCorner(n, m) = d.upper_right().conjugate();
    r.bottomRightCorner(n, m) = d.upper_left().conjugate();
    return r;
}

StructureCheck is_doubled(const Matrix& r, double tol) {
    if (r.rows() < 2 || r.cols() < 2 || r.rows() % 2 != 0 || r.cols() % 2 != 0) {
        throw DimensionMismatch("is_doubled: matrix must have even, positive dimensions");
    }
    const Index n = r.rows() / 2;
    const Index m = r.cols() / 2;
    // Sigma R# Sigma swaps the block rows and block columns of R#, so the
    // residual can be read straight off the blocks.
    const double lower_left =
        max_abs(r.bottomLeftCorner(n, m) - r.topRightCorner(n, m).conjugate());
    const double lower_right =
        max_abs(r.bottomRightCorner(n, m) - r.topLeftCorner(n, m).conjugate());
    StructureCheck check;
    check.residual = std::max(lower_left, lower_right);
    check.pass = check.residual <= tol;
    return check;
}

DoubledMatrix contract(const Matrix& r, double tol) {
    const StructureCheck check = is_doubled(r, tol);
    if (!check.pass) {
        throw StructureViolation(
            "contract: matrix is not conjugate-block symmetric (residual " +
                std::to_string(check.residual) + ")",
            check.residual);
    }
    const Index n = r.rows() / 2;
    const Index m = r.cols() / 2;
    return DoubledMatrix(r.topLeftCorner(n, m), r.topRightCorner(n, m));
}

}  // namespace qsr
