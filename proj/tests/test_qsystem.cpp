#include "doctest.h"

#include <cmath>

#include "qsr/qsystem.hpp"
#include "test_support.hpp"

using namespace qsr;
using qsrtest::diff;

namespace {

// One-mode cavity at resonance: detuning 1, total damping rate 2, direct
// feedthrough. Realizes to F = diag(-1-i, -1+i), G = -sqrt(2) I.
PhysicalParams cavity_params() {
    const double root2 = std::sqrt(2.0);
    return PhysicalParams::canonical(
        DoubledMatrix(Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix(root2 * Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        Matrix::Identity(1, 1));
}

QuantumLinearSystem static_system(const Matrix& k_upper_left) {
    const Index m = k_upper_left.rows();
    return QuantumLinearSystem(
        DoubledMatrix(-Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, m), DoubledMatrix::zero(m, 1),
        DoubledMatrix(k_upper_left, Matrix::Zero(m, m)));
}

}  // namespace

TEST_CASE("realize maps zero parameters to the identity channel") {
    const PhysicalParams p = PhysicalParams::canonical(
        DoubledMatrix::zero(2, 2), DoubledMatrix::zero(1, 2),
        Matrix::Identity(1, 1));
    const QuantumLinearSystem sys = realize(p);
    CHECK(max_abs(expand(sys.F())) == 0.0);
    CHECK(max_abs(expand(sys.G())) == 0.0);
    CHECK(max_abs(expand(sys.H())) == 0.0);
    CHECK(diff(expand(sys.K()), Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("realize reproduces the hand-computed cavity matrices") {
    const QuantumLinearSystem sys = realize(cavity_params());
    const double root2 = std::sqrt(2.0);

    Matrix f_want(2, 2);
    f_want << Complex(-1, -1), 0, 0, Complex(-1, 1);
    CHECK(diff(expand(sys.F()), f_want) < 1e-15);
    CHECK(diff(expand(sys.G()), -root2 * Matrix::Identity(2, 2)) < 1e-15);
    CHECK(diff(expand(sys.H()), root2 * Matrix::Identity(2, 2)) < 1e-15);
    CHECK(diff(expand(sys.K()), Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("realize output is conjugate-block symmetric for random parameters") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const QuantumLinearSystem sys = realize(qsrtest::rand_physical(rng, 2, 2));
        CHECK(is_doubled(expand(sys.F()), 1e-12).pass);
        CHECK(is_doubled(expand(sys.G()), 1e-12).pass);
    }
}

TEST_CASE("parameter validation names the offending field") {
    std::mt19937_64 rng(29);
    const PhysicalParams good = qsrtest::rand_physical(rng, 2, 1);

    PhysicalParams bad_m = good;
    bad_m.M = DoubledMatrix(Matrix::Constant(2, 2, Complex(0, 1)),
                            Matrix::Zero(2, 2));
    CHECK_THROWS_WITH_AS(validate_physical_params(bad_m),
                         doctest::Contains("M"), StructureViolation);

    PhysicalParams bad_s = good;
    bad_s.S = 2.0 * Matrix::Identity(1, 1);
    CHECK_THROWS_WITH_AS(validate_physical_params(bad_s),
                         doctest::Contains("S"), StructureViolation);

    PhysicalParams bad_theta = good;
    bad_theta.Theta = Matrix::Identity(4, 4);  // doubled, not anti-doubled
    CHECK_THROWS_AS(validate_physical_params(bad_theta), StructureViolation);

    PhysicalParams sing_theta = good;
    sing_theta.Theta = Matrix::Zero(4, 4);
    CHECK_THROWS_AS(validate_physical_params(sing_theta), StructureViolation);
}

TEST_CASE("canonical extraction inverts realize") {
    // pure detuning, no damping or coupling: F = -iJ recovers M = I exactly
    const QuantumLinearSystem detuned(
        DoubledMatrix(Matrix::Constant(1, 1, Complex(0, -1)), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        DoubledMatrix::identity(1));
    const CanonicalExtraction zero = extract_canonical_params(detuned);
    CHECK(diff(expand(zero.params.M), Matrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs(expand(zero.params.N)) == 0.0);
    CHECK(diff(zero.params.S, Matrix::Identity(1, 1)) == 0.0);

    const PhysicalParams p = cavity_params();
    const CanonicalExtraction back = extract_canonical_params(realize(p));
    CHECK(diff(back.params.M, p.M) < 1e-12);
    CHECK(diff(back.params.N, p.N) < 1e-12);
    CHECK(diff(back.params.S, p.S) < 1e-12);
    CHECK(back.m_hermiticity_residual < 1e-12);
    CHECK(back.g_identity_residual < 1e-12);
}

TEST_CASE("extraction rejects a system with anti-Hermitian recovered Hamiltonian") {
    // F = I with no damping recovers M = iJ, which is anti-Hermitian.
    const QuantumLinearSystem sys(
        DoubledMatrix(Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        DoubledMatrix::identity(1));
    CHECK_THROWS_AS(extract_canonical_params(sys), NotRealizable);
    try {
        extract_canonical_params(sys);
    } catch (const NotRealizable& e) {
        CHECK(e.residual() == doctest::Approx(2.0));
    }
}

TEST_CASE("extraction rejects a feedthrough outside scattering form") {
    Matrix squeeze(2, 2);
    squeeze << std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0);
    QuantumLinearSystem sys(
        DoubledMatrix(-Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        contract(squeeze));
    CHECK_THROWS_AS(extract_canonical_params(sys), StructureViolation);
}

TEST_CASE("roundtrip through realize and extraction is tight") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 25; ++t) {
        const Index n = 1 + static_cast<Index>(rng() % 3);
        const Index m = 1 + static_cast<Index>(rng() % 2);
        const PhysicalParams p = qsrtest::rand_physical(rng, n, m);
        const CanonicalExtraction back = extract_canonical_params(realize(p));
        CHECK(diff(back.params.M, p.M) < 1e-10);
        CHECK(diff(back.params.N, p.N) < 1e-10);
        CHECK(qsrtest::diff(back.params.S, p.S) < 1e-10);
    }
}

TEST_CASE("transfer function matches the resolvent formula") {
    const QuantumLinearSystem statics = static_system(2.0 * Matrix::Identity(1, 1));
    CHECK(diff(transfer_function(statics, Complex(0.3, 0.7)),
               2.0 * Matrix::Identity(2, 2)) == 0.0);

    // cavity at s = 0: 1 - 2/(i + 1) on the annihilation channel
    const QuantumLinearSystem cav = realize(cavity_params());
    Matrix want(2, 2);
    want << Complex(0, 1), 0, 0, Complex(0, -1);
    CHECK(diff(transfer_function(cav, 0.0), want) < 1e-14);

    // far from the spectrum the feedthrough dominates
    CHECK(diff(transfer_function(cav, 1e6), Matrix::Identity(2, 2)) < 1e-4);
}

TEST_CASE("transfer function refuses a pole") {
    const QuantumLinearSystem cav = realize(cavity_params());
    CHECK_THROWS_AS(transfer_function(cav, Complex(-1, -1)), SingularMatrix);
}

TEST_CASE("transfer function is invariant under a state change of coordinates") {
    std::mt19937_64 rng(37);
    const QuantumLinearSystem sys = realize(qsrtest::rand_physical(rng, 2, 2));
    // a well-conditioned doubled coordinate change: identity plus a small kick
    const DoubledMatrix kick = qsrtest::rand_doubled(rng, 2, 2, 0.25);
    const Matrix t = Matrix::Identity(4, 4) + expand(kick);
    const Matrix t_inv = t.inverse();

    const QuantumLinearSystem moved(contract(t * expand(sys.F()) * t_inv, 1e-10),
                                    contract(t * expand(sys.G()), 1e-10),
                                    contract(expand(sys.H()) * t_inv, 1e-10),
                                    sys.K());
    for (const Complex s : {Complex(0, 1), Complex(0.4, 0.2), Complex(2, -3)}) {
        CHECK(diff(transfer_function(sys, s), transfer_function(moved, s)) < 1e-8);
    }
}

TEST_CASE("default samples are deterministic and avoid the spectrum") {
    const QuantumLinearSystem cav = realize(cavity_params());
    const std::vector<Complex> a = default_samples(cav);
    const std::vector<Complex> b = default_samples(cav);
    REQUIRE(a.size() == 12);
    CHECK(a == b);
    for (const Complex s : a) {
        CHECK(std::abs(s - Complex(-1, -1)) > 1e-6);
        CHECK(std::abs(s - Complex(-1, 1)) > 1e-6);
        // finite either way; the fixed grid sits on the imaginary axis
        CHECK(std::isfinite(s.real()));
    }

    SampleOptions more;
    more.count = 20;
    CHECK(default_samples(cav, more).size() == 20);
}

TEST_CASE("flatness check passes realized systems and measures static gains") {
    const QuantumLinearSystem cav = realize(cavity_params());
    const FrequencyCheck ok = jj_unitarity_check(cav, default_samples(cav));
    CHECK(ok.pass);
    CHECK(ok.max_residual < 1e-8);

    // K = 2I: Phi'JPhi = 4J, residual 3 against J
    const QuantumLinearSystem loud = static_system(2.0 * Matrix::Identity(1, 1));
    const FrequencyCheck bad = jj_unitarity_check(loud, default_samples(loud));
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_residual == doctest::Approx(3.0));

    // a static squeezer is flat: cosh^2 - sinh^2 = 1
    Matrix squeeze(2, 2);
    squeeze << std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0);
    const QuantumLinearSystem sq(
        DoubledMatrix(-Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1), contract(squeeze));
    const FrequencyCheck flat = jj_unitarity_check(sq, default_samples(sq));
    CHECK(flat.pass);
    CHECK(flat.max_residual < 1e-12);
}

TEST_CASE("flatness residual stays small across four decades of frequency") {
    const QuantumLinearSystem cav = realize(cavity_params());
    std::vector<Complex> sweep;
    for (double w = 0.1; w <= 100.0; w *= 1.6) sweep.emplace_back(0.0, w);
    CHECK(jj_unitarity_check(cav, sweep).max_residual < 1e-7);
}

TEST_CASE("flatness check rejects an empty sample list") {
    const QuantumLinearSystem cav = realize(cavity_params());
    CHECK_THROWS_AS(jj_unitarity_check(cav, {}), InvalidParameter);
}

TEST_CASE("minimality ranks reflect coupled and uncoupled modes") {
    const MinimalityReport full = minimality_check(realize(cavity_params()));
    CHECK(full.controllability_rank == 2);
    CHECK(full.observability_rank == 2);
    CHECK(full.minimal);

    const MinimalityReport none =
        minimality_check(static_system(Matrix::Identity(1, 1)));
    CHECK(none.controllability_rank == 0);
    CHECK(none.observability_rank == 0);
    CHECK_FALSE(none.minimal);

    // two modes, only the first is driven and observed
    Matrix g1(2, 1);
    g1 << 1, 0;
    const QuantumLinearSystem half(
        DoubledMatrix(-Matrix::Identity(2, 2), Matrix::Zero(2, 2)),
        DoubledMatrix(g1, Matrix::Zero(2, 1)),
        DoubledMatrix(g1.transpose(), Matrix::Zero(1, 2)),
        DoubledMatrix::identity(1));
    const MinimalityReport partial = minimality_check(half);
    CHECK(partial.controllability_rank == 2);
    CHECK(partial.full_rank == 4);
    CHECK_FALSE(partial.minimal);
}

TEST_CASE("eigenvalue pair condition flags symmetric spectra") {
    const EigenPairReport damped =
        eigenvalue_pair_check(static_system(Matrix::Identity(1, 1)));
    CHECK(damped.min_pair_sum == doctest::Approx(2.0));
    CHECK(damped.pass);

    const QuantumLinearSystem undamped(
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        DoubledMatrix::zero(1, 1), DoubledMatrix::identity(1));
    const EigenPairReport zero = eigenvalue_pair_check(undamped);
    CHECK(zero.min_pair_sum == doctest::Approx(0.0));
    CHECK_FALSE(zero.pass);

    const EigenPairReport cav = eigenvalue_pair_check(realize(cavity_params()));
    CHECK(cav.min_pair_sum == doctest::Approx(2.0));
    CHECK(cav.pass);
}

TEST_CASE("scattering form accepts diag(S, S#) with unitary S only") {
    CHECK(scattering_form_check(static_system(Matrix::Identity(2, 2))).pass);

    const ScatteringReport loud =
        scattering_form_check(static_system(2.0 * Matrix::Identity(1, 1)));
    CHECK_FALSE(loud.pass);
    CHECK(loud.unitarity_residual == doctest::Approx(3.0));

    Matrix squeezer(2, 2);
    squeezer << -5.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0, -5.0 / 3.0;
    const QuantumLinearSystem sq(
        DoubledMatrix(-Matrix::Identity(1, 1), Matrix::Zero(1, 1)),
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        contract(squeezer));
    const ScatteringReport off = scattering_form_check(sq);
    CHECK_FALSE(off.pass);
    CHECK(off.offdiag_residual == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("combined realizability check reaches the right verdicts") {
    std::mt19937_64 rng(41);
    const RealizabilityReport good =
        check_physical_realizability(realize(qsrtest::rand_physical(rng, 2, 2)));
    CHECK(good.verdict == Verdict::pass);
    CHECK(good.jj.max_residual < 1e-8);
    REQUIRE(good.canonical_m_hermiticity.has_value());
    CHECK(*good.canonical_m_hermiticity < 1e-10);

    const RealizabilityReport loud =
        check_physical_realizability(static_system(2.0 * Matrix::Identity(1, 1)));
    CHECK(loud.verdict == Verdict::fail);
    CHECK_FALSE(loud.scattering.pass);

    // flat and in scattering form, but with no dynamics to witness either
    // hypothesis: conditions hold, hypotheses fail
    const QuantumLinearSystem inert(
        DoubledMatrix::zero(1, 1), DoubledMatrix::zero(1, 1),
        DoubledMatrix::zero(1, 1), DoubledMatrix::identity(1));
    const RealizabilityReport undecided = check_physical_realizability(inert);
    CHECK(undecided.verdict == Verdict::inconclusive);
    CHECK(undecided.jj.pass);
    CHECK_FALSE(undecided.minimality.minimal);
    CHECK_FALSE(undecided.eig_pairs.pass);
}

TEST_CASE("verdict names render for reports") {
    CHECK(to_string(Verdict::pass) == "pass");
    CHECK(to_string(Verdict::fail) == "fail");
    CHECK(to_string(Verdict::inconclusive) == "inconclusive");
}
