#pragma once

#include "qsr/special_class.hpp"

namespace qsr {

// Worked two-mode example: a passive cavity mode a1 (damping rates k1, k2
// through the two mirrors) coupled to a strongly damped squeezer mode a2
// (damping rate gamma, self-interaction strength chi). Eliminating a2
// leaves an effective one-mode system driven through a squeezed input.
//
// The same parameter set doubles as the description of the eps-family with
// (gamma, chi) read as the scaled rates (gamma/eps, chi/eps are the
// physical rates of the family member at eps).
struct CavitySqueezerParams {
    double k1 = 1.0;
    double k2 = 1.0;
    double gamma = 1.0;
    Complex chi = 0.0;
};

// Throws InvalidParameter unless k1 >= 0, k2 >= 0 and gamma > 0.
void validate(const CavitySqueezerParams& p);

// The full two-mode system (n = 2, m = 1) at the literal rates in p.
QuantumLinearSystem build_full(const CavitySqueezerParams& p);

// The slow/fast family with mode a1 slow and a2 fast, gamma and chi read as
// scaled rates. assemble(build_perturbed(p), eps) has the same transfer
// function as build_full at rates (k1, k2, gamma/eps, chi/eps).
PerturbedSystem build_perturbed(const CavitySqueezerParams& p);

// Canonical-form generating data of the family, recovered from the member
// at eps = 1 and partitioned along the mode split.
SpecialClassParams special_params(const CavitySqueezerParams& p);

// The block reduction of the family (the ground truth), together with a
// comparison against a legacy closed-form expression for the same system:
// with W = [[gamma/2, -chi], [-chi#, gamma/2]]^{-1},
//
//     F0 = -(1/2)(sqrt(k1)+sqrt(k2))^2 I + gamma sqrt(k1 k2) W,
//     G0 = -(1/2)(sqrt(k1)+sqrt(k2)) I + gamma sqrt(k2) W,
//     H0 =  (1/2)(sqrt(k1)+sqrt(k2)) I - gamma sqrt(k1) W,
//     K0 =  I - gamma W.
//
// That expression is internally inconsistent (its 1/2 factors and the sign
// of chi inside W disagree with the block reduction and break flatness of
// the reduced transfer function), so the discrepancies are reported rather
// than hidden; away from special parameter coincidences they are nonzero.
struct ReducedReference {
    QuantumLinearSystem reduced;         // reduce(build_perturbed(p))
    double f_discrepancy = 0.0;          // legacy closed form vs. reduced
    double g_discrepancy = 0.0;
    double h_discrepancy = 0.0;
    double k_discrepancy = 0.0;
};

// Runs the block reduction and attaches the comparison above. Throws
// SingularFastDynamics when |chi| is at or near gamma/2 (both routes lose
// invertibility at the same point).
ReducedReference reduced_reference(const CavitySqueezerParams& p);

}  // namespace qsr
