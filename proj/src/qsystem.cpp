#include "qsr/qsystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
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

// Uniform double in [0, 1) from the top 53 bits of the generator, so the
// stream is identical on every platform.
double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

QuantumLinearSystem::QuantumLinearSystem(DoubledMatrix f, DoubledMatrix g,
                                         DoubledMatrix h, DoubledMatrix k)
    : f_(std::move(f)), g_(std::move(g)), h_(std::move(h)), k_(std::move(k)) {
    const Index n = f_.half_rows();
    const Index m = g_.half_cols();
    if (f_.half_cols() != n) {
        throw DimensionMismatch("QuantumLinearSystem: F must be square");
    }
    if (g_.half_rows() != n) {
        throw DimensionMismatch("QuantumLinearSystem: G row count must match F");
    }
    if (h_.half_rows() != m || h_.half_cols() != n) {
        throw DimensionMismatch("QuantumLinearSystem: H must be m x n in half blocks");
    }
    if (k_.half_rows() != m || k_.half_cols() != m) {
        throw DimensionMismatch("QuantumLinearSystem: K must be m x m in half blocks");
    }
}

PhysicalParams PhysicalParams::canonical(DoubledMatrix m_matrix, DoubledMatrix n_matrix,
                                         Matrix s_matrix) {
    PhysicalParams p{.n_modes = m_matrix.half_rows(),
                     .m_fields = n_matrix.half_rows(),
                     .Theta = jmat(m_matrix.half_rows()),
                     .M = std::move(m_matrix),
                     .N = std::move(n_matrix),
                     .S = std::move(s_matrix)};
    return p;
}

void validate_physical_params(const PhysicalParams& p, double tol) {
    const Index n = p.n_modes;
    const Index m = p.m_fields;
    if (n < 1 || m < 1) {
        throw DimensionMismatch("physical params: n_modes and m_fields must be positive");
    }
    if (p.M.half_rows() != n || p.M.half_cols() != n) {
        throw DimensionMismatch("physical params: M must be n x n in half blocks");
    }
    if (p.N.half_rows() != m || p.N.half_cols() != n) {
        throw DimensionMismatch("physical params: N must be m x n in half blocks");
    }
    if (p.Theta.rows() != 2 * n || p.Theta.cols() != 2 * n) {
        throw DimensionMismatch("physical params: Theta must be 2n x 2n");
    }
    if (p.S.rows() != m || p.S.cols() != m) {
        throw DimensionMismatch("physical params: S must be m x m");
    }
    if (!p.Theta.allFinite() || !p.S.allFinite()) {
        throw InvalidParameter("physical params: entries must be finite");
    }

    const double theta_herm = max_abs(p.Theta - p.Theta.adjoint());
    if (theta_herm > tol) {
        throw StructureViolation("physical params: Theta is not Hermitian (residual " +
                                     fmt(theta_herm) + ")",
                                 theta_herm);
    }
    const Matrix sigma = sigma_mat(n);
    const double theta_anti =
        max_abs(sigma * p.Theta.conjugate() * sigma + p.Theta);
    if (theta_anti > tol) {
        throw StructureViolation(
            "physical params: Theta must satisfy Sigma Theta# Sigma = -Theta (residual " +
                fmt(theta_anti) + ")",
            theta_anti);
    }
    Eigen::PartialPivLU<Matrix> theta_lu(p.Theta);
    if (!(theta_lu.rcond() >= 1e-12)) {  // NaN-safe: NaN means singular
        throw StructureViolation("physical params: Theta is numerically singular", 0.0);
    }

    const Matrix m_full = expand(p.M);
    const double m_herm = max_abs(m_full - m_full.adjoint());
    if (m_herm > tol) {
        throw StructureViolation(
            "physical params: M is not Hermitian (residual " + fmt(m_herm) + ")", m_herm);
    }
    const Index mm = p.S.rows();
    const double s_unit = std::max(
        max_abs(p.S.adjoint() * p.S - Matrix::Identity(mm, mm)),
        max_abs(p.S * p.S.adjoint() - Matrix::Identity(mm, mm)));
    if (s_unit > tol) {
        throw StructureViolation(
            "physical params: S is not unitary (residual " + fmt(s_unit) + ")", s_unit);
    }
}

QuantumLinearSystem realize(const PhysicalParams& p, double tol) {
    validate_physical_params(p, tol);
    const Index m = p.m_fields;
    const Matrix jm = jmat(m);
    const Matrix m_full = expand(p.M);
    const Matrix n_full = expand(p.N);
    const DoubledMatrix k_doubled(p.S, Matrix::Zero(m, m));
    const Matrix k_full = expand(k_doubled);

    const Matrix f_full = Complex(0.0, -1.0) * p.Theta * m_full -
                          0.5 * p.Theta * n_full.adjoint() * jm * n_full;
    const Matrix g_full = -p.Theta * n_full.adjoint() * jm * k_full;

    return QuantumLinearSystem(contract(f_full), contract(g_full), p.N, k_doubled);
}

CanonicalExtraction extract_canonical_params(const QuantumLinearSystem& sys, double tol) {
    const Index m = sys.m_fields();
    const Index n = sys.n_modes();
    const Matrix jm = jmat(m);
    const Matrix jn = jmat(n);

    const double k_offdiag = max_abs(sys.K().upper_right());
    if (k_offdiag > tol) {
        throw StructureViolation(
            "extract: K is not block diagonal, so no scattering matrix exists (residual " +
                fmt(k_offdiag) + ")",
            k_offdiag);
    }
    const Matrix s = sys.K().upper_left();
    const double s_unit = std::max(
        max_abs(s.adjoint() * s - Matrix::Identity(m, m)),
        max_abs(s * s.adjoint() - Matrix::Identity(m, m)));
    if (s_unit > tol) {
        throw StructureViolation(
            "extract: scattering matrix is not unitary (residual " + fmt(s_unit) + ")",
            s_unit);
    }

    const Matrix n_full = expand(sys.H());
    const Matrix f_full = expand(sys.F());
    const Matrix m_raw =
        Complex(0.0, 1.0) * jn * (f_full + 0.5 * jn * n_full.adjoint() * jm * n_full);
    const double m_herm = max_abs(m_raw - m_raw.adjoint());
    if (m_herm > tol) {
        throw NotRealizable(
            "extract: recovered Hamiltonian matrix is not Hermitian (residual " +
                fmt(m_herm) + "); the system is not canonically realizable",
            m_herm);
    }
    const Matrix k_full = expand(sys.K());
    const double g_resid =
        max_abs(expand(sys.G()) + jn * n_full.adjoint() * jm * k_full);

    // Symmetrizing removes rounding-level skew without moving M more than
    // the reported residual.
    const Matrix m_herm_part = 0.5 * (m_raw + m_raw.adjoint());

    CanonicalExtraction out{
        .params = PhysicalParams::canonical(contract(m_herm_part), sys.H(), s),
        .m_hermiticity_residual = m_herm,
        .g_identity_residual = g_resid};
    return out;
}

Matrix transfer_function(const QuantumLinearSystem& sys, Complex s) {
    const Index n2 = 2 * sys.n_modes();
    const Matrix a = s * Matrix::Identity(n2, n2) - expand(sys.F());
    Eigen::PartialPivLU<Matrix> lu(a);
    if (!(lu.rcond() >= kResolventRcondFloor)) {  // NaN-safe: NaN means singular
        throw SingularMatrix("transfer_function: s is numerically a pole (rcond " +
                             fmt(lu.rcond()) + ")");
    }
    return expand(sys.H()) * lu.solve(expand(sys.G())) + expand(sys.K());
}

std::vector<Complex> default_samples(const QuantumLinearSystem& sys,
                                     const SampleOptions& opt) {
    if (opt.count < 1) {
        throw InvalidParameter("default_samples: count must be positive");
    }
    Eigen::ComplexEigenSolver<Matrix> es(expand(sys.F()), false);
    std::vector<Complex> poles;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex ev = es.eigenvalues()(i);
        poles.push_back(ev);           // poles of Phi(s)
        poles.push_back(-std::conj(ev));  // poles of Phi(-conj(s))'
    }
    const auto well_separated = [&poles](Complex s) {
        for (const Complex& p : poles) {
            if (std::abs(s - p) < 1e-6) return false;
        }
        return true;
    };

    std::vector<Complex> samples;
    static constexpr double kFixedFrequencies[] = {0.1, 0.5, 1.0, 2.0, 10.0, 100.0};
    for (double w : kFixedFrequencies) {
        if (static_cast<int>(samples.size()) >= opt.count) break;
        const Complex s(0.0, w);
        if (well_separated(s)) samples.push_back(s);
    }

    std::mt19937_64 rng(opt.seed);
    int guard = 0;
    while (static_cast<int>(samples.size()) < opt.count) {
        if (++guard > 100000) {
            throw InvalidParameter(
                "default_samples: could not find enough sample points away from poles");
        }
        const Complex s(-10.0 + 20.0 * unit_real(rng), -10.0 + 20.0 * unit_real(rng));
        if (std::abs(s) > 10.0) continue;
        if (!well_separated(s)) continue;
        samples.push_back(s);
    }
    return samples;
}

FrequencyCheck jj_unitarity_check(const QuantumLinearSystem& sys,
                                  const std::vector<Complex>& samples, double tol) {
    if (samples.empty()) {
        throw InvalidParameter("jj_unitarity_check: sample list is empty");
    }
    const Matrix jm = jmat(sys.m_fields());
    FrequencyCheck check;
    check.samples = samples;
    for (const Complex& s : samples) {
        const Matrix phi = transfer_function(sys, s);
        const Matrix phi_mirror = transfer_function(sys, -std::conj(s));
        const double r = max_abs(phi_mirror.adjoint() * jm * phi - jm);
        check.max_residual = std::max(check.max_residual, r);
    }
    check.pass = check.max_residual <= tol;
    return check;
}

namespace {

Index numerical_rank(const Matrix& a, double rtol) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double threshold = kRankAtol + rtol * sv(0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) ++rank;
    }
    return rank;
}

}  // namespace

MinimalityReport minimality_check(const QuantumLinearSystem& sys, double rank_rtol) {
    const Matrix f = expand(sys.F());
    const Matrix g = expand(sys.G());
    const Matrix h = expand(sys.H());
    const Index n2 = f.rows();
    const Index m2 = g.cols();

    Matrix ctrb(n2, n2 * m2);
    Matrix obsv(n2 * m2, n2);
    Matrix fg = g;       // F^k G
    Matrix hf = h;       // H F^k
    for (Index k = 0; k < n2; ++k) {
        ctrb.middleCols(k * m2, m2) = fg;
        obsv.middleRows(k * m2, m2) = hf;
        if (k + 1 < n2) {
            fg = f * fg;
            hf = hf * f;
        }
    }

    MinimalityReport report;
    report.full_rank = n2;
    report.controllability_rank = numerical_rank(ctrb, rank_rtol);
    report.observability_rank = numerical_rank(obsv, rank_rtol);
    report.minimal = report.controllability_rank == n2 && report.observability_rank == n2;
    return report;
}

EigenPairReport eigenvalue_pair_check(const QuantumLinearSystem& sys, double tol) {
    Eigen::ComplexEigenSolver<Matrix> es(expand(sys.F()), false);
    const auto& ev = es.eigenvalues();
    EigenPairReport report;
    report.min_pair_sum = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < ev.size(); ++i) {
        for (Index j = i; j < ev.size(); ++j) {
            const double mag = std::abs(ev(i) + ev(j));
            if (mag < report.min_pair_sum) {
                report.min_pair_sum = mag;
                report.witness_i = ev(i);
                report.witness_j = ev(j);
            }
        }
    }
    report.pass = report.min_pair_sum > tol;
    return report;
}

ScatteringReport scattering_form_check(const QuantumLinearSystem& sys, double tol) {
    const Index m = sys.m_fields();
    const Matrix& s = sys.K().upper_left();
    ScatteringReport report;
    report.offdiag_residual = max_abs(sys.K().upper_right());
    report.unitarity_residual = std::max(
        max_abs(s.adjoint() * s - Matrix::Identity(m, m)),
        max_abs(s * s.adjoint() - Matrix::Identity(m, m)));
    report.pass = report.offdiag_residual <= tol && report.unitarity_residual <= tol;
    return report;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "fail";
}

RealizabilityReport check_physical_realizability(const QuantumLinearSystem& sys,
                                                 const CheckOptions& opt) {
    RealizabilityReport report;
    report.minimality = minimality_check(sys, opt.rank_rtol);
    report.eig_pairs = eigenvalue_pair_check(sys, opt.tol);
    report.scattering = scattering_form_check(sys, opt.tol);
    const std::vector<Complex> samples =
        default_samples(sys, {.count = opt.samples, .seed = opt.seed});
    report.jj = jj_unitarity_check(sys, samples, opt.tol);

    if (report.scattering.pass) {
        // The canonical-parameter route is available; its residuals are
        // reported as corroborating evidence but do not decide the verdict.
        try {
            const CanonicalExtraction ext = extract_canonical_params(sys, opt.tol);
            report.canonical_m_hermiticity = ext.m_hermiticity_residual;
            report.canonical_g_identity = ext.g_identity_residual;
        } catch (const NotRealizable& e) {
            report.canonical_m_hermiticity = e.residual();
        }
    }

    const bool conditions = report.jj.pass && report.scattering.pass;
    const bool hypotheses = report.minimality.minimal && report.eig_pairs.pass;
    if (conditions && hypotheses) {
        report.verdict = Verdict::pass;
    } else if (conditions) {
        report.verdict = Verdict::inconclusive;
    } else {
        report.verdict = Verdict::fail;
    }
    return report;
}

}  // namespace qsr
