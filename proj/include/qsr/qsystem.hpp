#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsr/doubled.hpp"

namespace qsr {

// Relative tolerance used when thresholding singular values for numerical
// rank, and its absolute floor.
inline constexpr double kRankRtol = 1e-8;
inline constexpr double kRankAtol = 1e-10;

// Reciprocal-condition floor below which a resolvent solve is refused.
inline constexpr double kResolventRcondFloor = 1e-13;

// A linear input/output system in doubled form:
//
//     dx = F x dt + G dw,      dy = H x dt + K dw,
//
// with x the 2n-vector of mode variables and their conjugates, and w the
// 2m-vector of input field quadrature pairs. All four matrices carry the
// conjugate-block symmetry by construction.
class QuantumLinearSystem {
public:
    // Throws DimensionMismatch unless F is 2n x 2n, G is 2n x 2m,
    // H is 2m x 2n and K is 2m x 2m (in half-block terms).
    QuantumLinearSystem(DoubledMatrix f, DoubledMatrix g, DoubledMatrix h,
                        DoubledMatrix k);

    Index n_modes() const noexcept { return f_.half_rows(); }
    Index m_fields() const noexcept { return g_.half_cols(); }

    const DoubledMatrix& F() const noexcept { return f_; }
    const DoubledMatrix& G() const noexcept { return g_; }
    const DoubledMatrix& H() const noexcept { return h_; }
    const DoubledMatrix& K() const noexcept { return k_; }

private:
    DoubledMatrix f_, g_, h_, k_;
};

// Generating parameters of a realizable system: a Hermitian doubled
// Hamiltonian matrix M, a coupling matrix N, a unitary scattering matrix S,
// and a commutation matrix Theta (Hermitian, nonsingular, and
// anti-symmetric under the doubled involution: Sigma Theta# Sigma = -Theta).
struct PhysicalParams {
    Index n_modes = 0;
    Index m_fields = 0;
    Matrix Theta;     // 2n x 2n
    DoubledMatrix M;  // 2n x 2n, Hermitian
    DoubledMatrix N;  // 2m x 2n
    Matrix S;         // m x m, unitary

    // Canonical commutation matrix Theta = J.
    static PhysicalParams canonical(DoubledMatrix m_matrix, DoubledMatrix n_matrix,
                                    Matrix s_matrix);
};

// Checks every PhysicalParams invariant; throws StructureViolation or
// DimensionMismatch on the first failure, naming the offending field.
void validate_physical_params(const PhysicalParams& p, double tol = kCheckTol);

// Builds the unique system generated by p:
//
//     F = -i Theta M - (1/2) Theta N' J N,   G = - Theta N' J K,
//     H = N,                                 K = diag(S, S#),
//
// with ' the adjoint. Validates p first.
QuantumLinearSystem realize(const PhysicalParams& p, double tol = kCheckTol);

// Result of inverting the construction above along the canonical
// (Theta = J) branch.
struct CanonicalExtraction {
    PhysicalParams params;
    double m_hermiticity_residual = 0.0;  // distance of recovered M from Hermitian
    double g_identity_residual = 0.0;     // || G + J N' J K ||_max
};

// Recovers (M, N, S) from a system assumed to be in canonical form:
// N = H, S = upper-left block of K, M = i J (F + (1/2) J N' J N).
// Throws StructureViolation if K is not block-diagonal with unitary S,
// and NotRealizable if the recovered M fails Hermiticity beyond tol.
CanonicalExtraction extract_canonical_params(const QuantumLinearSystem& sys,
                                             double tol = kCheckTol);

// Transfer function Phi(s) = H (sI - F)^{-1} G + K as a full 2m x 2m matrix.
// Throws SingularMatrix when s is numerically a pole.
Matrix transfer_function(const QuantumLinearSystem& sys, Complex s);

struct SampleOptions {
    int count = 12;
    std::uint64_t seed = 42;
};

// Deterministic sample points for frequency-domain checks: fixed points
// i*w for w in {0.1, 0.5, 1, 2, 10, 100} first, then pseudo-random points
// with |s| <= 10 from the seeded generator. Any candidate within 1e-6 of an
// eigenvalue of F or of -F' is discarded (fixed points are skipped, random
// points redrawn) so resolvents at the samples are well posed.
std::vector<Complex> default_samples(const QuantumLinearSystem& sys,
                                     const SampleOptions& opt = {});

struct FrequencyCheck {
    double max_residual = 0.0;
    bool pass = false;
    std::vector<Complex> samples;
};

// Samples the two-sided flatness identity Phi(-conj(s))' J Phi(s) = J and
// returns the worst max-entry residual. Sample points must avoid the poles
// of Phi(s) and of Phi(-conj(s))' (default_samples guarantees this).
FrequencyCheck jj_unitarity_check(const QuantumLinearSystem& sys,
                                  const std::vector<Complex>& samples,
                                  double tol = kCheckTol);

struct MinimalityReport {
    Index controllability_rank = 0;
    Index observability_rank = 0;
    Index full_rank = 0;  // 2n
    bool minimal = false;
};

// Numerical ranks of the controllability and observability block matrices,
// thresholded at (kRankAtol + rank_rtol * sigma_max).
MinimalityReport minimality_check(const QuantumLinearSystem& sys,
                                  double rank_rtol = kRankRtol);

struct EigenPairReport {
    double min_pair_sum = 0.0;  // min over ordered pairs of |lambda_i + lambda_j|
    Complex witness_i;
    Complex witness_j;
    bool pass = false;
};

// Checks that no two eigenvalues of F (i = j allowed) sum to zero within
// tol; the failing or minimal pair is reported as a witness.
EigenPairReport eigenvalue_pair_check(const QuantumLinearSystem& sys,
                                      double tol = kCheckTol);

struct ScatteringReport {
    double offdiag_residual = 0.0;    // size of the upper-right block of K
    double unitarity_residual = 0.0;  // max of ||S'S - I|| and ||SS' - I||
    bool pass = false;
};

// Checks that K = diag(S, S#) with S unitary.
ScatteringReport scattering_form_check(const QuantumLinearSystem& sys,
                                       double tol = kCheckTol);

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct CheckOptions {
    double tol = kCheckTol;
    int samples = 12;
    std::uint64_t seed = 42;
    double rank_rtol = kRankRtol;
};

// Combined realizability report. The frequency-domain conditions
// (JJ-flatness and scattering form) decide pass vs fail; minimality and the
// eigenvalue-pair condition are the hypotheses under which those conditions
// are conclusive. Conditions met with hypotheses violated yields
// Verdict::inconclusive.
struct RealizabilityReport {
    MinimalityReport minimality;
    EigenPairReport eig_pairs;
    FrequencyCheck jj;
    ScatteringReport scattering;
    std::optional<double> canonical_m_hermiticity;  // set when K has scattering form
    std::optional<double> canonical_g_identity;
    Verdict verdict = Verdict::fail;
};

RealizabilityReport check_physical_realizability(const QuantumLinearSystem& sys,
                                                 const CheckOptions& opt = {});

}  // namespace qsr
