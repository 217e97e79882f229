#include "qsr/special_class.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace qsr {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// Product at the half-block level: exact closure, no structural rounding.
DoubledMatrix doubled_product(const DoubledMatrix& a, const DoubledMatrix& b) {
    if (a.half_cols() != b.half_rows()) {
        throw DimensionMismatch("doubled product: inner dimensions disagree");
    }
    Matrix r1 = a.upper_left() * b.upper_left() +
                a.upper_right() * b.upper_right().conjugate();
    Matrix r2 = a.upper_left() * b.upper_right() +
                a.upper_right() * b.upper_left().conjugate();
    return DoubledMatrix(std::move(r1), std::move(r2));
}

// Expanded working set shared by the family, reduction and decomposition
// formulas. D and Dbar = D' are the fast response matrices.
struct SpecialRaw {
    Matrix ma, mb, mc, md, na, nb;  // expanded blocks
    Matrix k;                       // expanded diag(S, S#)
    Matrix js, jf, jm;              // J at slow, fast and field sizes
    Matrix b, c;                    // slow/fast coupling combinations
    Matrix d, dbar;
    Eigen::PartialPivLU<Matrix> d_lu, dbar_lu;
};

SpecialRaw special_raw(const SpecialClassParams& p, double tol, bool need_limit) {
    const SpecialClassValidation v = validate_params(p, tol);
    if (!v.pass) {
        const double worst = std::max({v.ma_hermiticity, v.md_hermiticity,
                                       v.mc_adjoint_residual, v.s_unitarity});
        throw StructureViolation(
            "special class: parameter invariants violated (worst residual " + fmt(worst) +
                "; Ma/Md must be Hermitian, Mc = Mb', S unitary)",
            worst);
    }
    SpecialRaw raw;
    raw.ma = expand(p.Ma);
    raw.mb = expand(p.Mb);
    raw.mc = expand(p.Mc);
    raw.md = expand(p.Md);
    raw.na = expand(p.Na);
    raw.nb = expand(p.Nb);
    raw.k = expand(DoubledMatrix(p.S, Matrix::Zero(p.m_fields, p.m_fields)));
    raw.js = jmat(p.n_slow);
    raw.jf = jmat(p.n_fast);
    raw.jm = jmat(p.m_fields);

    const Complex i(0.0, 1.0);
    const Matrix nb_j = raw.nb.adjoint() * raw.jm;
    raw.b = i * raw.mb + 0.5 * raw.na.adjoint() * raw.jm * raw.nb;
    raw.c = i * raw.mc + 0.5 * nb_j * raw.na;
    raw.d = i * raw.md + 0.5 * nb_j * raw.nb;
    raw.dbar = -i * raw.md + 0.5 * nb_j * raw.nb;

    if (need_limit) {
        raw.d_lu.compute(raw.d);
        if (!(raw.d_lu.rcond() >= kFastRcondFloor)) {  // NaN-safe: NaN means singular
            throw SingularFastDynamics(
                "special class: fast response matrix D is numerically singular (rcond " +
                    fmt(raw.d_lu.rcond()) + "); the slow/fast limit does not exist",
                raw.d_lu.rcond());
        }
        raw.dbar_lu.compute(raw.dbar);  // Dbar = D', same conditioning
    }
    return raw;
}

struct SpecialReduced {
    Matrix f0, g0, h0, k0;
};

SpecialReduced reduce_from_raw(const SpecialRaw& raw) {
    const Complex i(0.0, 1.0);
    SpecialReduced out;
    out.f0 = -raw.js * (i * raw.ma + 0.5 * raw.na.adjoint() * raw.jm * raw.na) +
             raw.js * raw.b * raw.d_lu.solve(raw.c);
    out.g0 = -raw.js * raw.na.adjoint() * raw.jm * raw.k +
             raw.js * raw.b * raw.d_lu.solve(raw.nb.adjoint() * raw.jm * raw.k);
    out.h0 = raw.na - raw.nb * raw.d_lu.solve(raw.c);
    out.k0 = raw.k - raw.nb * raw.d_lu.solve(raw.nb.adjoint() * raw.jm * raw.k);
    return out;
}

// Everything decompose produces, kept in expanded form so the audit can
// inspect structural residuals before any contraction.
struct DecomposeRaw {
    SpecialReduced red;
    Matrix m_explicit;
    Matrix n_tilde;
    double agreement = 0.0;
};

DecomposeRaw decompose_raw(const SpecialRaw& raw) {
    const Complex i(0.0, 1.0);
    DecomposeRaw out;
    out.red = reduce_from_raw(raw);

    // Closed-form Hamiltonian matrix of the realizable core: the fast block
    // is integrated out symmetrically through D and Dbar.
    const Matrix cross = raw.nb.adjoint() * raw.jm * raw.na;    // Nb' J Na
    const Matrix cross_t = raw.na.adjoint() * raw.jm * raw.nb;  // Na' J Nb
    const Matrix d_inv_mc = raw.d_lu.solve(raw.mc);
    const Matrix dbar_inv_mc = raw.dbar_lu.solve(raw.mc);
    const Matrix d_inv_cross = raw.d_lu.solve(cross);
    const Matrix dbar_inv_cross = raw.dbar_lu.solve(cross);

    out.m_explicit = raw.ma
        - (i / 2.0) * raw.mb * d_inv_mc
        + (i / 2.0) * raw.mb * dbar_inv_mc
        - 0.25 * raw.mb * (d_inv_cross + dbar_inv_cross)
        - 0.25 * cross_t * (d_inv_mc + dbar_inv_mc)
        + (i / 8.0) * cross_t * (d_inv_cross - dbar_inv_cross);

    // Independent route: invert the realization map on the reduced system.
    out.n_tilde = out.red.h0;
    const Matrix m_extracted =
        i * raw.js *
        (out.red.f0 + 0.5 * raw.js * out.n_tilde.adjoint() * raw.jm * out.n_tilde);
    out.agreement = max_abs(out.m_explicit - m_extracted);
    if (out.agreement > kFormulaAgreementTol) {
        throw InternalInconsistency(
            "decompose: explicit and extracted Hamiltonian matrices disagree (residual " +
            fmt(out.agreement) + "); this indicates a defect in the decomposition formulas");
    }
    return out;
}

Decomposition build_decomposition(const SpecialClassParams& p, const DecomposeRaw& raw,
                                  double tol) {
    const Index m = p.m_fields;
    Decomposition out{
        .pr_params = PhysicalParams::canonical(contract(raw.m_explicit),
                                               contract(raw.n_tilde),
                                               Matrix::Identity(m, m)),
        .static_part = BogoliubovComponent{contract(raw.red.k0)},
        .reconstruction_residual = 0.0,
        .m_formula_agreement = raw.agreement};

    const QuantumLinearSystem core = realize(out.pr_params, tol);
    const QuantumLinearSystem recon = series_with_static(core, out.static_part.B);
    double r = max_abs(expand(recon.F()) - raw.red.f0);
    r = std::max(r, max_abs(expand(recon.G()) - raw.red.g0));
    r = std::max(r, max_abs(expand(recon.H()) - raw.red.h0));
    r = std::max(r, max_abs(expand(recon.K()) - raw.red.k0));
    out.reconstruction_residual = r;
    return out;
}

}  // namespace

SpecialClassParams::SpecialClassParams(DoubledMatrix ma, DoubledMatrix mb,
                                       DoubledMatrix mc, DoubledMatrix md,
                                       DoubledMatrix na, DoubledMatrix nb, Matrix s)
    : n_slow(ma.half_rows()),
      n_fast(md.half_rows()),
      m_fields(na.half_rows()),
      Ma(std::move(ma)),
      Mb(std::move(mb)),
      Mc(std::move(mc)),
      Md(std::move(md)),
      Na(std::move(na)),
      Nb(std::move(nb)),
      S(std::move(s)) {
    const auto expect = [](const DoubledMatrix& d, Index rows, Index cols,
                           const char* name) {
        if (d.half_rows() != rows || d.half_cols() != cols) {
            throw DimensionMismatch(std::string("SpecialClassParams: block ") + name +
                                    " has inconsistent shape");
        }
    };
    expect(Ma, n_slow, n_slow, "Ma");
    expect(Mb, n_slow, n_fast, "Mb");
    expect(Mc, n_fast, n_slow, "Mc");
    expect(Md, n_fast, n_fast, "Md");
    expect(Na, m_fields, n_slow, "Na");
    expect(Nb, m_fields, n_fast, "Nb");
    if (S.rows() != m_fields || S.cols() != m_fields) {
        throw DimensionMismatch("SpecialClassParams: S must be m x m");
    }
    if (!S.allFinite()) {
        throw InvalidParameter("SpecialClassParams: S entries must be finite");
    }
}

SpecialClassValidation validate_params(const SpecialClassParams& p, double tol) {
    SpecialClassValidation v;
    const Matrix ma = expand(p.Ma);
    const Matrix md = expand(p.Md);
    v.ma_hermiticity = max_abs(ma - ma.adjoint());
    v.md_hermiticity = max_abs(md - md.adjoint());
    v.mc_adjoint_residual = max_abs(expand(p.Mc) - expand(p.Mb).adjoint());
    const Index m = p.m_fields;
    v.s_unitarity = std::max(max_abs(p.S.adjoint() * p.S - Matrix::Identity(m, m)),
                             max_abs(p.S * p.S.adjoint() - Matrix::Identity(m, m)));
    v.pass = v.ma_hermiticity <= tol && v.md_hermiticity <= tol &&
             v.mc_adjoint_residual <= tol && v.s_unitarity <= tol;
    return v;
}

PerturbedSystem to_perturbed(const SpecialClassParams& p, double tol) {
    // The family is well defined even when its slow/fast limit is not, so D
    // is not required to be invertible here.
    const SpecialRaw raw = special_raw(p, tol, /*need_limit=*/false);

    const Complex i(0.0, 1.0);
    const Matrix fa = -raw.js * (i * raw.ma + 0.5 * raw.na.adjoint() * raw.jm * raw.na);
    const Matrix fb = -raw.js * raw.b;
    const Matrix fc = -raw.jf * raw.c;
    const Matrix fd = -raw.jf * raw.d;
    const Matrix ga = -raw.js * raw.na.adjoint() * raw.jm * raw.k;
    const Matrix gb = -raw.jf * raw.nb.adjoint() * raw.jm * raw.k;

    return PerturbedSystem(contract(fa), contract(fb), contract(fc), contract(fd),
                           contract(ga), contract(gb), p.Na, p.Nb,
                           DoubledMatrix(p.S, Matrix::Zero(p.m_fields, p.m_fields)));
}

QuantumLinearSystem reduce_special(const SpecialClassParams& p, double tol) {
    const SpecialRaw raw = special_raw(p, tol, /*need_limit=*/true);
    const SpecialReduced red = reduce_from_raw(raw);
    return QuantumLinearSystem(contract(red.f0), contract(red.g0), contract(red.h0),
                               contract(red.k0));
}

BogoliubovCheck is_bogoliubov(const DoubledMatrix& b, double tol) {
    if (b.half_rows() != b.half_cols()) {
        throw DimensionMismatch("is_bogoliubov: matrix must be square");
    }
    const Index m = b.half_rows();
    const Matrix jm = jmat(m);
    const Matrix bf = expand(b);
    const Matrix id = Matrix::Identity(2 * m, 2 * m);
    BogoliubovCheck check;
    check.residual = std::max(max_abs(jm * bf.adjoint() * jm * bf - id),
                              max_abs(bf * jm * bf.adjoint() * jm - id));
    check.pass = check.residual <= tol;
    return check;
}

QuantumLinearSystem series_with_static(const QuantumLinearSystem& sys,
                                       const DoubledMatrix& b) {
    if (b.half_rows() != b.half_cols()) {
        throw DimensionMismatch("series_with_static: static component must be square");
    }
    if (b.half_rows() != sys.m_fields()) {
        throw DimensionMismatch(
            "series_with_static: field dimensions of the system and the static "
            "component disagree");
    }
    return QuantumLinearSystem(sys.F(), doubled_product(sys.G(), b), sys.H(),
                               doubled_product(sys.K(), b));
}

Decomposition decompose(const SpecialClassParams& p, double tol) {
    const SpecialRaw raw = special_raw(p, tol, /*need_limit=*/true);
    return build_decomposition(p, decompose_raw(raw), tol);
}

DecompositionReport verify_decomposition(const SpecialClassParams& p, double tol) {
    const SpecialRaw raw = special_raw(p, tol, /*need_limit=*/true);
    const DecomposeRaw dec = decompose_raw(raw);
    const Decomposition built = build_decomposition(p, dec, tol);

    DecompositionReport report;
    report.m_hermiticity = max_abs(dec.m_explicit - dec.m_explicit.adjoint());
    report.m_doubled = is_doubled(dec.m_explicit).residual;
    report.n_doubled = is_doubled(dec.n_tilde).residual;
    report.k_doubled = is_doubled(dec.red.k0).residual;
    report.bogoliubov = is_bogoliubov(built.static_part.B, tol).residual;
    report.reconstruction = built.reconstruction_residual;
    report.g_identity = max_abs(dec.red.g0 +
                                raw.js * dec.n_tilde.adjoint() * raw.jm * dec.red.k0);
    report.m_formula_agreement = dec.agreement;
    report.pass = report.m_hermiticity <= tol && report.m_doubled <= tol &&
                  report.n_doubled <= tol && report.k_doubled <= tol &&
                  report.bogoliubov <= tol && report.reconstruction <= tol &&
                  report.g_identity <= tol && report.m_formula_agreement <= tol;
    return report;
}

}  // namespace qsr
