#include "doctest.h"

#include <limits>

#include "qsr/doubled.hpp"
#include "test_support.hpp"

using namespace qsr;
using qsrtest::diff;

TEST_CASE("expand produces the conjugate-block form") {
    // R1 = I1, R2 = 0 expands to the 2x2 identity
    const DoubledMatrix id(Matrix::Identity(1, 1), Matrix::Zero(1, 1));
    CHECK(diff(expand(id), Matrix::Identity(2, 2)) == 0.0);

    // R1 = 0, R2 = I1 expands to the block-swap Sigma
    const DoubledMatrix swap(Matrix::Zero(1, 1), Matrix::Identity(1, 1));
    CHECK(diff(expand(swap), sigma_mat(1)) == 0.0);

    // complex entries are conjugated in the lower blocks
    const DoubledMatrix d(Matrix::Constant(1, 1, Complex(0, 1)),
                          Matrix::Constant(1, 1, Complex(2, 0)));
    Matrix want(2, 2);
    want << Complex(0, 1), Complex(2, 0), Complex(2, 0), Complex(0, -1);
    CHECK(diff(expand(d), want) == 0.0);
}

TEST_CASE("structure matrices satisfy their exact identities") {
    for (Index m : {1, 2, 3}) {
        const Matrix j = jmat(m);
        const Matrix sig = sigma_mat(m);
        const Matrix id = Matrix::Identity(2 * m, 2 * m);
        CHECK(diff(j * j, id) == 0.0);
        CHECK(diff(sig * sig, id) == 0.0);
        CHECK(diff(sig * j * sig, -j) == 0.0);
    }
}

TEST_CASE("is_doubled accepts symmetric matrices and rejects J") {
    CHECK(is_doubled(sigma_mat(1)).residual == 0.0);
    CHECK(is_doubled(sigma_mat(1)).pass);

    // J flips sign under the symmetry, residual is the full entry gap
    const StructureCheck jc = is_doubled(jmat(1));
    CHECK(jc.residual == doctest::Approx(2.0));
    CHECK_FALSE(jc.pass);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        const DoubledMatrix d = qsrtest::rand_doubled(rng, 3, 2);
        CHECK(is_doubled(expand(d)).residual == 0.0);
    }
}

TEST_CASE("is_doubled rejects odd or empty shapes") {
    CHECK_THROWS_AS(is_doubled(Matrix::Identity(3, 3)), DimensionMismatch);
    CHECK_THROWS_AS(is_doubled(Matrix::Identity(2, 3)), DimensionMismatch);
    CHECK_THROWS_AS(is_doubled(Matrix(0, 0)), DimensionMismatch);
}

TEST_CASE("contract reads the upper blocks back off") {
    Matrix full(2, 2);
    full << Complex(0, 1), Complex(2, 0), Complex(2, 0), Complex(0, -1);
    const DoubledMatrix d = contract(full);
    CHECK(d.upper_left()(0, 0) == Complex(0, 1));
    CHECK(d.upper_right()(0, 0) == Complex(2, 0));

    const DoubledMatrix id = contract(Matrix::Identity(2, 2));
    CHECK(id.upper_left()(0, 0) == Complex(1, 0));
    CHECK(id.upper_right()(0, 0) == Complex(0, 0));
}

TEST_CASE("contract of an expand is the identity map, exactly") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const DoubledMatrix d = qsrtest::rand_doubled(rng, 2, 4);
        const DoubledMatrix back = contract(expand(d));
        CHECK(diff(back.upper_left(), d.upper_left()) == 0.0);
        CHECK(diff(back.upper_right(), d.upper_right()) == 0.0);
    }
}

TEST_CASE("contract refuses asymmetric matrices with the residual attached") {
    CHECK_THROWS_AS(contract(jmat(2)), StructureViolation);
    try {
        contract(jmat(2));
    } catch (const StructureViolation& e) {
        CHECK(e.residual() == doctest::Approx(2.0));
    }
}

TEST_CASE("doubled matrices are closed under product and adjoint") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        const Index n = 1 + static_cast<Index>(rng() % 4);
        const Index k = 1 + static_cast<Index>(rng() % 4);
        const Index m = 1 + static_cast<Index>(rng() % 4);
        const DoubledMatrix a = qsrtest::rand_doubled(rng, n, k);
        const DoubledMatrix b = qsrtest::rand_doubled(rng, k, m);
        CHECK(is_doubled(expand(a) * expand(b), 1e-12).pass);
        CHECK(is_doubled(expand(a).adjoint(), 1e-12).pass);
    }
}

TEST_CASE("constructor validates block shapes and entries") {
    CHECK_THROWS_AS(DoubledMatrix(Matrix::Zero(2, 2), Matrix::Zero(2, 3)),
                    DimensionMismatch);
    CHECK_THROWS_AS(DoubledMatrix(Matrix(0, 0), Matrix(0, 0)), DimensionMismatch);
    Matrix bad = Matrix::Zero(1, 1);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DoubledMatrix(bad, Matrix::Zero(1, 1)), InvalidParameter);
}

TEST_CASE("zero and identity factories have the advertised blocks") {
    const DoubledMatrix z = DoubledMatrix::zero(2, 3);
    CHECK(z.half_rows() == 2);
    CHECK(z.half_cols() == 3);
    CHECK(max_abs(expand(z)) == 0.0);

    const DoubledMatrix id = DoubledMatrix::identity(2);
    CHECK(diff(expand(id), Matrix::Identity(4, 4)) == 0.0);
}
