#include "qsr/perturbation.hpp"

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

// Expanded slow/fast pieces shared by reduce and the expansion terms.
struct ReducedRaw {
    Matrix f0, g0, h0, k0;
};

ReducedRaw reduce_raw(const PerturbedSystem& ps) {
    const Matrix fd = expand(ps.Fd);
    Eigen::PartialPivLU<Matrix> lu(fd);
    // The comparison is written so that a NaN condition estimate (exactly
    // singular factor) also lands in the error branch.
    if (!(lu.rcond() >= kFastRcondFloor)) {
        throw SingularFastDynamics(
            "reduce: fast block Fd is numerically singular (rcond " + fmt(lu.rcond()) +
                "); the slow/fast limit does not exist",
            lu.rcond());
    }
    const Matrix fd_inv_fc = lu.solve(expand(ps.Fc));
    const Matrix fd_inv_gb = lu.solve(expand(ps.Gb));
    ReducedRaw out;
    out.f0 = expand(ps.Fa) - expand(ps.Fb) * fd_inv_fc;
    out.g0 = expand(ps.Ga) - expand(ps.Fb) * fd_inv_gb;
    out.h0 = expand(ps.Ha) - expand(ps.Hb) * fd_inv_fc;
    out.k0 = expand(ps.K) - expand(ps.Hb) * fd_inv_gb;
    return out;
}

}  // namespace

PerturbedSystem::PerturbedSystem(DoubledMatrix fa, DoubledMatrix fb, DoubledMatrix fc,
                                 DoubledMatrix fd, DoubledMatrix ga, DoubledMatrix gb,
                                 DoubledMatrix ha, DoubledMatrix hb, DoubledMatrix k)
    : n_slow(fa.half_rows()),
      n_fast(fd.half_rows()),
      m_fields(ga.half_cols()),
      Fa(std::move(fa)),
      Fb(std::move(fb)),
      Fc(std::move(fc)),
      Fd(std::move(fd)),
      Ga(std::move(ga)),
      Gb(std::move(gb)),
      Ha(std::move(ha)),
      Hb(std::move(hb)),
      K(std::move(k)) {
    const auto expect = [](const DoubledMatrix& d, Index rows, Index cols,
                           const char* name) {
        if (d.half_rows() != rows || d.half_cols() != cols) {
            throw DimensionMismatch(std::string("PerturbedSystem: block ") + name +
                                    " has inconsistent shape");
        }
    };
    expect(Fa, n_slow, n_slow, "Fa");
    expect(Fb, n_slow, n_fast, "Fb");
    expect(Fc, n_fast, n_slow, "Fc");
    expect(Fd, n_fast, n_fast, "Fd");
    expect(Ga, n_slow, m_fields, "Ga");
    expect(Gb, n_fast, m_fields, "Gb");
    expect(Ha, m_fields, n_slow, "Ha");
    expect(Hb, m_fields, n_fast, "Hb");
    expect(K, m_fields, m_fields, "K");
}

QuantumLinearSystem assemble(const PerturbedSystem& ps, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidParameter("assemble: eps must be positive and finite");
    }
    const Index ns = ps.n_slow;
    const Index nf = ps.n_fast;
    const Index n = ns + nf;
    const Index m = ps.m_fields;

    // Stitch the half blocks directly so the assembled matrices are doubled
    // by construction, with no structural residual to round through.
    Matrix f1(n, n), f2(n, n), g1(n, m), g2(n, m), h1(m, n), h2(m, n);
    f1.topLeftCorner(ns, ns) = ps.Fa.upper_left();
    f1.topRightCorner(ns, nf) = ps.Fb.upper_left();
    f1.bottomLeftCorner(nf, ns) = ps.Fc.upper_left() / eps;
    f1.bottomRightCorner(nf, nf) = ps.Fd.upper_left() / eps;
    f2.topLeftCorner(ns, ns) = ps.Fa.upper_right();
    f2.topRightCorner(ns, nf) = ps.Fb.upper_right();
    f2.bottomLeftCorner(nf, ns) = ps.Fc.upper_right() / eps;
    f2.bottomRightCorner(nf, nf) = ps.Fd.upper_right() / eps;
    g1.topRows(ns) = ps.Ga.upper_left();
    g1.bottomRows(nf) = ps.Gb.upper_left() / eps;
    g2.topRows(ns) = ps.Ga.upper_right();
    g2.bottomRows(nf) = ps.Gb.upper_right() / eps;
    h1.leftCols(ns) = ps.Ha.upper_left();
    h1.rightCols(nf) = ps.Hb.upper_left();
    h2.leftCols(ns) = ps.Ha.upper_right();
    h2.rightCols(nf) = ps.Hb.upper_right();

    return QuantumLinearSystem(DoubledMatrix(f1, f2), DoubledMatrix(g1, g2),
                               DoubledMatrix(h1, h2), ps.K);
}

QuantumLinearSystem reduce(const PerturbedSystem& ps) {
    const ReducedRaw raw = reduce_raw(ps);
    return QuantumLinearSystem(contract(raw.f0), contract(raw.g0), contract(raw.h0),
                               contract(raw.k0));
}

Matrix first_order_term(const PerturbedSystem& ps, Complex s) {
    const ReducedRaw raw = reduce_raw(ps);
    const Index n2 = raw.f0.rows();

    const Matrix resolvent_arg = s * Matrix::Identity(n2, n2) - raw.f0;
    Eigen::PartialPivLU<Matrix> lu(resolvent_arg);
    if (!(lu.rcond() >= kResolventRcondFloor)) {  // NaN-safe: NaN means singular
        throw SingularMatrix(
            "first_order_term: s is numerically a pole of the reduced system (rcond " +
            fmt(lu.rcond()) + ")");
    }
    const Matrix fd_inv = Eigen::PartialPivLU<Matrix>(expand(ps.Fd)).inverse();
    const Matrix left = raw.h0 * lu.solve(expand(ps.Fb)) + expand(ps.Hb);
    const Matrix right = expand(ps.Fc) * lu.solve(raw.g0) + expand(ps.Gb);
    return -s * left * fd_inv * fd_inv * right;
}

double expansion_residual(const PerturbedSystem& ps, double eps, Complex s) {
    const Matrix phi_eps = transfer_function(assemble(ps, eps), s);
    const Matrix phi_0 = transfer_function(reduce(ps), s);
    const Matrix l = first_order_term(ps, s);
    return max_abs(phi_eps - phi_0 - eps * l);
}

std::vector<ConvergenceRow> convergence_probe(const PerturbedSystem& ps,
                                              const std::vector<double>& eps_list,
                                              Complex s) {
    if (eps_list.size() < 2) {
        throw InvalidParameter("convergence_probe: need at least two eps values");
    }
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) {
            throw InvalidParameter("convergence_probe: eps values must be positive");
        }
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
            throw InvalidParameter("convergence_probe: eps values must be strictly decreasing");
        }
    }

    std::vector<ConvergenceRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        ConvergenceRow row;
        row.eps = eps;
        row.residual = expansion_residual(ps, eps, s);
        if (!rows.empty()) {
            const ConvergenceRow& prev = rows.back();
            if (row.residual < kExactResidualFloor || prev.residual < kExactResidualFloor) {
                // The expansion is exact to rounding; no finite order exists.
                row.exact = true;
            } else {
                row.local_order = std::log(prev.residual / row.residual) /
                                  std::log(prev.eps / row.eps);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qsr
