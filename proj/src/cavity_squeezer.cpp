#include "qsr/cavity_squeezer.hpp"

#include <cmath>

namespace qsr {

void validate(const CavitySqueezerParams& p) {
    if (!std::isfinite(p.k1) || !std::isfinite(p.k2) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.chi.real()) || !std::isfinite(p.chi.imag())) {
        throw InvalidParameter("cavity-squeezer: parameters must be finite");
    }
    if (p.k1 < 0.0 || p.k2 < 0.0) {
        throw InvalidParameter("cavity-squeezer: mirror couplings k1, k2 must be >= 0");
    }
    if (!(p.gamma > 0.0)) {
        throw InvalidParameter("cavity-squeezer: squeezer coupling gamma must be > 0");
    }
}

QuantumLinearSystem build_full(const CavitySqueezerParams& p) {
    validate(p);
    const double root_sum = std::sqrt(p.k1) + std::sqrt(p.k2);

    Matrix f1(2, 2), f2(2, 2), g1(2, 1), h1(1, 2);
    f1 << -0.5 * root_sum * root_sum, -std::sqrt(p.k1 * p.gamma),
          -std::sqrt(p.k2 * p.gamma), -0.5 * p.gamma;
    f2 << 0.0, 0.0,
          0.0, -p.chi;
    g1 << -root_sum,
          -std::sqrt(p.gamma);
    h1 << root_sum, std::sqrt(p.gamma);

    return QuantumLinearSystem(DoubledMatrix(f1, f2),
                               DoubledMatrix(g1, Matrix::Zero(2, 1)),
                               DoubledMatrix(h1, Matrix::Zero(1, 2)),
                               DoubledMatrix::identity(1));
}

PerturbedSystem build_perturbed(const CavitySqueezerParams& p) {
    validate(p);
    const double root_sum = std::sqrt(p.k1) + std::sqrt(p.k2);
    const auto scalar = [](Complex v) -> Matrix {
        return Matrix::Constant(1, 1, v);
    };
    const Matrix zero = Matrix::Zero(1, 1);

    // Rescaling the fast mode by 1/sqrt(eps) concentrates all eps
    // dependence in the standard slow/fast pattern; every block below is
    // eps-free.
    const DoubledMatrix fa(scalar(-0.5 * root_sum * root_sum), zero);
    const DoubledMatrix fb(scalar(-std::sqrt(p.k1 * p.gamma)), zero);
    const DoubledMatrix fc(scalar(-std::sqrt(p.k2 * p.gamma)), zero);
    const DoubledMatrix fd(scalar(-0.5 * p.gamma), scalar(-p.chi));
    const DoubledMatrix ga(scalar(-root_sum), zero);
    const DoubledMatrix gb(scalar(-std::sqrt(p.gamma)), zero);
    const DoubledMatrix ha(scalar(root_sum), zero);
    const DoubledMatrix hb(scalar(std::sqrt(p.gamma)), zero);

    return PerturbedSystem(fa, fb, fc, fd, ga, gb, ha, hb, DoubledMatrix::identity(1));
}

SpecialClassParams special_params(const CavitySqueezerParams& p) {
    // Recover the canonical data from the family member at unit scale, then
    // split every matrix along the slow/fast mode partition.
    const CanonicalExtraction ext = extract_canonical_params(build_full(p));
    const DoubledMatrix& m = ext.params.M;
    const DoubledMatrix& n = ext.params.N;

    const auto mode_block = [&m](Index row, Index col) {
        return DoubledMatrix(m.upper_left().block(row, col, 1, 1),
                             m.upper_right().block(row, col, 1, 1));
    };
    const auto coupling_block = [&n](Index col) {
        return DoubledMatrix(n.upper_left().col(col), n.upper_right().col(col));
    };

    return SpecialClassParams(mode_block(0, 0), mode_block(0, 1), mode_block(1, 0),
                              mode_block(1, 1), coupling_block(0), coupling_block(1),
                              ext.params.S);
}

ReducedReference reduced_reference(const CavitySqueezerParams& p) {
    QuantumLinearSystem reduced = reduce(build_perturbed(p));

    // Legacy closed-form evaluation, kept verbatim for the comparison.
    Matrix w(2, 2);
    w << 0.5 * p.gamma, -p.chi,
         -std::conj(p.chi), 0.5 * p.gamma;
    const Matrix w_inv = w.inverse();
    const Matrix id = Matrix::Identity(2, 2);
    const double root_sum = std::sqrt(p.k1) + std::sqrt(p.k2);

    const Matrix f_cf = -0.5 * root_sum * root_sum * id +
                        p.gamma * std::sqrt(p.k1 * p.k2) * w_inv;
    const Matrix g_cf = -0.5 * root_sum * id + p.gamma * std::sqrt(p.k2) * w_inv;
    const Matrix h_cf = 0.5 * root_sum * id - p.gamma * std::sqrt(p.k1) * w_inv;
    const Matrix k_cf = id - p.gamma * w_inv;

    ReducedReference out{.reduced = std::move(reduced),
                         .f_discrepancy = 0.0,
                         .g_discrepancy = 0.0,
                         .h_discrepancy = 0.0,
                         .k_discrepancy = 0.0};
    out.f_discrepancy = max_abs(expand(out.reduced.F()) - f_cf);
    out.g_discrepancy = max_abs(expand(out.reduced.G()) - g_cf);
    out.h_discrepancy = max_abs(expand(out.reduced.H()) - h_cf);
    out.k_discrepancy = max_abs(expand(out.reduced.K()) - k_cf);
    return out;
}

}  // namespace qsr
