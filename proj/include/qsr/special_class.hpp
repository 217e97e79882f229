#pragma once

#include "qsr/perturbation.hpp"

namespace qsr {

// The two independent computations of the reduced Hamiltonian matrix must
// agree to this tolerance, else the decomposition aborts.
inline constexpr double kFormulaAgreementTol = 1e-9;

// Canonical-form generating data for a slow/fast family: a partitioned
// Hermitian Hamiltonian matrix [[Ma, Mb], [Mc, Md]] with Mc = Mb' and
// Ma, Md Hermitian, a partitioned coupling [Na, Nb], and a unitary
// scattering matrix S. The fast couplings enter the family at strength
// 1/sqrt(eps) and the fast Hamiltonian block at 1/eps.
struct SpecialClassParams {
    Index n_slow = 0;
    Index n_fast = 0;
    Index m_fields = 0;
    DoubledMatrix Ma, Mb, Mc, Md;
    DoubledMatrix Na, Nb;
    Matrix S;

    // Throws DimensionMismatch on inconsistent block shapes. Value-level
    // invariants (Hermiticity, unitarity) are checked by validate_params.
    SpecialClassParams(DoubledMatrix ma, DoubledMatrix mb, DoubledMatrix mc,
                       DoubledMatrix md, DoubledMatrix na, DoubledMatrix nb,
                       Matrix s);
};

struct SpecialClassValidation {
    double ma_hermiticity = 0.0;
    double md_hermiticity = 0.0;
    double mc_adjoint_residual = 0.0;  // || Mc - Mb' ||_max
    double s_unitarity = 0.0;
    bool pass = false;
};

SpecialClassValidation validate_params(const SpecialClassParams& p,
                                       double tol = kCheckTol);

// Expresses the family in explicit slow/fast block form, with the fast
// couplings absorbed so that assemble() reproduces the family exactly:
//
//     Fa = -J (i Ma + (1/2) Na' J Na),   Fb = -J B,   Fc = -J C,   Fd = -J D,
//     Ga = -J Na' J K,  Gb = -J Nb' J K,  Ha = Na,  Hb = Nb,  K = diag(S, S#),
//
// where D = i Md + (1/2) Nb' J Nb, B = i Mb + (1/2) Na' J Nb and
// C = i Mc + (1/2) Nb' J Na. Throws StructureViolation if validate_params
// fails at tol.
PerturbedSystem to_perturbed(const SpecialClassParams& p, double tol = kCheckTol);

// Slow/fast limit computed directly from the generating data:
//
//     F0 = -J (i Ma + (1/2) Na' J Na) + J B D^{-1} C,
//     G0 = -J Na' J K + J B D^{-1} Nb' J K,
//     H0 = Na - Nb D^{-1} C,
//     K0 = K - Nb D^{-1} Nb' J K   (J applied inside the coupling term).
//
// Agrees with reduce(to_perturbed(p)) entrywise. Throws
// SingularFastDynamics when rcond(D) < kFastRcondFloor.
QuantumLinearSystem reduce_special(const SpecialClassParams& p,
                                   double tol = kCheckTol);

// A static (memoryless) doubled component y = B w.
struct BogoliubovComponent {
    DoubledMatrix B;
};

struct BogoliubovCheck {
    double residual = 0.0;  // max of || J B' J B - I || and || B J B' J - I ||
    bool pass = false;
};

// A doubled matrix B is Bogoliubov when J B' J B = B J B' J = I, i.e. it is
// unitary with respect to the indefinite metric J.
BogoliubovCheck is_bogoliubov(const DoubledMatrix& b, double tol = kCheckTol);

// Feeds the static component into the input of sys:
// (F, G, H, K) -> (F, G B, H, K B). Throws DimensionMismatch if the inner
// field dimensions disagree.
QuantumLinearSystem series_with_static(const QuantumLinearSystem& sys,
                                       const DoubledMatrix& b);

// Splitting of the reduced system into a realizable core in series with a
// static Bogoliubov component at the input.
struct Decomposition {
    PhysicalParams pr_params;          // canonical, scattering matrix I
    BogoliubovComponent static_part;   // B = K0, the reduced scattering matrix
    double reconstruction_residual = 0.0;  // vs. reduce_special, entrywise
    double m_formula_agreement = 0.0;      // explicit vs. extracted Hamiltonian
};

// Builds the decomposition: the core has coupling N~ = H0, scattering I and
// Hamiltonian matrix M~ given by the closed-form combination
//
//     M~ = Ma - (i/2) Mb D^{-1} Mc + (i/2) Mb Db^{-1} Mc
//          - (1/4) [ Mb (D^{-1} + Db^{-1}) Nb' J Na
//                  + Na' J Nb (D^{-1} + Db^{-1}) Mc ]
//          + (i/8) Na' J Nb (D^{-1} - Db^{-1}) Nb' J Na,
//
// with Db = -i Md + (1/2) Nb' J Nb. The same matrix is recomputed as
// i J (F0 + (1/2) J N~' J N~) from the reduced system; the two must agree
// within kFormulaAgreementTol, else InternalInconsistency.
Decomposition decompose(const SpecialClassParams& p, double tol = kCheckTol);

// Full audit of the decomposition: every structural identity it relies on,
// as residuals. pass requires all residuals below tol.
struct DecompositionReport {
    double m_hermiticity = 0.0;
    double m_doubled = 0.0;  // conjugate-block symmetry of the raw M~
    double n_doubled = 0.0;
    double k_doubled = 0.0;
    double bogoliubov = 0.0;
    double reconstruction = 0.0;
    double g_identity = 0.0;            // || G0 + J N~' J K0 ||_max
    double m_formula_agreement = 0.0;
    bool pass = false;
};

DecompositionReport verify_decomposition(const SpecialClassParams& p,
                                         double tol = kCheckTol);

}  // namespace qsr
