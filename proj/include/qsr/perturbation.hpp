#pragma once

#include <optional>
#include <vector>

#include "qsr/qsystem.hpp"

namespace qsr {

// Reciprocal-condition floor below which the fast block is treated as
// singular and reduction is refused.
inline constexpr double kFastRcondFloor = 1e-12;

// Residuals at or below this are reported as exactly zero for the purpose
// of convergence-order estimates (the expansion is exact, no order exists).
inline constexpr double kExactResidualFloor = 1e-13;

// A system with an explicit slow/fast split. The family member at scale
// eps > 0 is
//
//     F(eps) = [ Fa      Fb     ]   G(eps) = [ Ga      ]   H = [ Ha  Hb ],
//              [ Fc/eps  Fd/eps ]            [ Gb/eps  ]
//
// with the slow block of size n_slow modes and the fast block of size
// n_fast modes. All blocks are doubled.
struct PerturbedSystem {
    Index n_slow = 0;
    Index n_fast = 0;
    Index m_fields = 0;
    DoubledMatrix Fa, Fb, Fc, Fd;
    DoubledMatrix Ga, Gb;
    DoubledMatrix Ha, Hb;
    DoubledMatrix K;

    // Throws DimensionMismatch unless all nine blocks are mutually
    // consistent with (n_slow, n_fast, m_fields).
    PerturbedSystem(DoubledMatrix fa, DoubledMatrix fb, DoubledMatrix fc,
                    DoubledMatrix fd, DoubledMatrix ga, DoubledMatrix gb,
                    DoubledMatrix ha, DoubledMatrix hb, DoubledMatrix k);
};

// Instantiates the family member at eps (> 0, else InvalidParameter).
// Assembled at the half-block level, so the result is doubled exactly.
QuantumLinearSystem assemble(const PerturbedSystem& ps, double eps);

// Slow/fast limit of the family: the reduced system
//
//     F0 = Fa - Fb Fd^{-1} Fc,   G0 = Ga - Fb Fd^{-1} Gb,
//     H0 = Ha - Hb Fd^{-1} Fc,   K0 = K  - Hb Fd^{-1} Gb.
//
// Throws SingularFastDynamics when rcond(Fd) < kFastRcondFloor.
QuantumLinearSystem reduce(const PerturbedSystem& ps);

// Frequency-domain first-order coefficient of the family at s: the transfer
// function satisfies Phi_eps(s) = Phi_0(s) + eps L(s) + O(eps^2) with
//
//     L(s) = -s (H0 (sI - F0)^{-1} Fb + Hb) Fd^{-2} (Fc (sI - F0)^{-1} G0 + Gb).
//
// Throws SingularFastDynamics on a singular fast block and SingularMatrix
// when s is a pole of the reduced system.
Matrix first_order_term(const PerturbedSystem& ps, Complex s);

// || Phi_eps(s) - Phi_0(s) - eps L(s) ||_max for one family member.
double expansion_residual(const PerturbedSystem& ps, double eps, Complex s);

struct ConvergenceRow {
    double eps = 0.0;
    double residual = 0.0;
    // Log-ratio order against the previous row; absent on the first row and
    // whenever either residual is below kExactResidualFloor (exact = true).
    std::optional<double> local_order;
    bool exact = false;
};

// Sweeps expansion_residual over a strictly decreasing list of positive eps
// values (at least two, else InvalidParameter) at fixed s.
std::vector<ConvergenceRow> convergence_probe(const PerturbedSystem& ps,
                                              const std::vector<double>& eps_list,
                                              Complex s);

}  // namespace qsr
