#include "mmlevy/rsolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmlevy/quad.hpp"

namespace mmlevy {

PhaseRates phase_rates(const MmLevyModel& m) {
    require_valid(m);
    PhaseRates r;
    r.rho = m.jump_rates();
    r.lambda = r.rho - m.Q.diagonal();
    const auto n = m.n();
    r.b.resize(n);
    r.c.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = m.a(i);
        const double s2 = m.sigma2(i);
        const double root = std::sqrt(a * a + 2.0 * r.lambda(i) * s2);
        // b = (root + a)/s2 loses digits when a << 0; use b c = 2 lambda / s2.
        if (a >= 0.0) {
            r.b(i) = (root + a) / s2;
            r.c(i) = r.b(i) - 2.0 * a / s2;
        } else {
            r.c(i) = (root - a) / s2;
            r.b(i) = 2.0 * r.lambda(i) / (s2 * r.c(i));
        }
    }
    return r;
}

namespace {

Matrix scaled_c_hat(const MmLevyModel& m, const PhaseRates& r, const Matrix& w, const QuadSettings& s) {
    const Vector two_over_s2 = 2.0 * m.sigma2.cwiseInverse();
    return two_over_s2.asDiagonal() * quad::c_hat(m, w, r.b, s);
}

void require_admissible(const Matrix& w, const char* what) {
    if (!w.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite matrix");
    if (w.minCoeff() < -1e-10 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument(std::string(what) + ": matrix must be nonnegative");
    }
}

// Linearly convergent inner loops get a fixed generous budget.
constexpr int kLinearBudget = 100000;

Matrix sylvester_fp(const Vector& b, const Vector& c, const Matrix& constant, double eps, InnerStats& st) {
    Matrix x = Matrix::Zero(constant.rows(), constant.cols());
    for (int k = 0; k < kLinearBudget; ++k) {
        ++st.iterations;
        Matrix next = matcore::diag_sylvester_solve(c, b, x * x + constant);
        const double err = matcore::inf_norm(next - x);
        x = std::move(next);
        if (!x.allFinite()) break;
        if (err <= eps) return x;
    }
    throw NumericalError("NARE Sylvester fixed point did not converge");
}

// Structured doubling for X C X - X D - A X + B = 0 with C = I, D = D_b,
// A = D_c, B = constant. Returns false on breakdown or non-convergence.
bool sda(const Vector& b, const Vector& c, const Matrix& constant, double eps, int max_iter, Matrix& out,
         InnerStats& st) {
    const auto n = constant.rows();
    const Matrix id = Matrix::Identity(n, n);
    const double gamma = std::max(b.maxCoeff(), c.maxCoeff());
    const Vector a_g = c.array() + gamma;
    const Vector d_g = b.array() + gamma;
    try {
        const Matrix w_g = Matrix(a_g.asDiagonal()) - constant * d_g.cwiseInverse().asDiagonal();
        const Matrix v_g = Matrix(d_g.asDiagonal()) - a_g.cwiseInverse().asDiagonal() * constant;
        const Matrix w_inv = matcore::solve(w_g, id, "SDA initialisation");
        const Matrix v_inv = matcore::solve(v_g, id, "SDA initialisation");
        Matrix e = id - 2.0 * gamma * v_inv;
        Matrix f = id - 2.0 * gamma * w_inv;
        Matrix g = 2.0 * gamma * (d_g.cwiseInverse().asDiagonal() * w_inv);
        Matrix h = 2.0 * gamma * (w_inv * constant * d_g.cwiseInverse().asDiagonal());
        for (int k = 0; k < max_iter; ++k) {
            ++st.iterations;
            const Matrix gh_inv_e = matcore::solve(id - g * h, e, "SDA step");
            const Matrix hg_inv_f = matcore::solve(id - h * g, f, "SDA step");
            const Matrix hg_inv_he = matcore::solve(id - h * g, h * e, "SDA step");
            const Matrix gh_inv_gf = matcore::solve(id - g * h, g * f, "SDA step");
            Matrix h_next = h + f * hg_inv_he;
            g = g + e * gh_inv_gf;
            const Matrix e_next = e * gh_inv_e;
            f = f * hg_inv_f;
            e = e_next;
            const double err = matcore::inf_norm(h_next - h);
            h = std::move(h_next);
            if (!h.allFinite()) return false;
            if (err <= eps * std::max(1.0, matcore::inf_norm(h))) {
                out = h;
                return true;
            }
        }
    } catch (const NumericalError&) {
        return false;
    }
    return false;
}

}  // namespace

Matrix nare_m_matrix(const MmLevyModel& m, const Matrix& w, const QuadSettings& s) {
    const auto r = phase_rates(m);
    require_admissible(w, "nare_m_matrix");
    const auto n = m.n();
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = matcore::diag(r.b);
    out.topRightCorner(n, n) = -Matrix::Identity(n, n);
    out.bottomLeftCorner(n, n) = -scaled_c_hat(m, r, w, s);
    out.bottomRightCorner(n, n) = matcore::diag(r.c);
    return out;
}

Matrix nare_minimal_solution(const Vector& b, const Vector& c, const Matrix& constant, InnerMethod method,
                             double eps, int max_iter, InnerStats* stats) {
    InnerStats local;
    InnerStats& st = stats ? *stats : local;
    st = InnerStats{};
    if (method == InnerMethod::sda) {
        Matrix x;
        if (sda(b, c, constant, eps, max_iter, x, st)) return x;
        st.fell_back = true;
    }
    return sylvester_fp(b, c, constant, eps, st);
}

Matrix nare_inner_solve(const MmLevyModel& m, const Matrix& w, InnerMethod method, double eps, int max_iter,
                        const QuadSettings& s, InnerStats* stats) {
    const auto r = phase_rates(m);
    require_admissible(w, "nare_inner_solve");
    return nare_minimal_solution(r.b, r.c, scaled_c_hat(m, r, w, s), method, eps, max_iter, stats);
}

Matrix psi_from_s(const PhaseRates& r, const Matrix& s) { return r.b.cwiseInverse().asDiagonal() * s; }

SolveReport nare_outer_solve(const MmLevyModel& m, const Matrix& s0, const SolveOptions& o) {
    SolveReport rep;
    rep.algorithm = "nare";
    detail::IterationLog log(rep, o);
    if (const auto v = validate(m); !v.empty()) {
        log.finish(SolveStatus::invalid_input, "invalid model: " + v.front().message);
        rep.residual = std::numeric_limits<double>::infinity();
        return rep;
    }
    const auto r = phase_rates(m);
    const bool shape_ok = s0.rows() == m.n() && s0.cols() == m.n();
    if (!shape_ok || !s0.allFinite() || s0.minCoeff() < -1e-10 ||
        ((s0.rowwise().sum() - r.b).array() > 1e-8 * r.b.maxCoeff()).any()) {
        log.finish(SolveStatus::invalid_input, "starting matrix must be n x n, nonnegative, with S0 1 <= b");
        rep.residual = std::numeric_limits<double>::infinity();
        return rep;
    }

    Matrix s = s0;
    SolveStatus status = SolveStatus::max_iter;
    std::string msg;
    try {
        for (int k = 0; k < o.max_iter; ++k) {
            Matrix next = nare_minimal_solution(r.b, r.c, scaled_c_hat(m, r, s, o.quad), o.inner, o.eps,
                                                o.inner_max_iter);
            if (!next.allFinite()) {
                status = SolveStatus::diverged;
                msg = "non-finite iterate";
                break;
            }
            const bool done = log.step(s, next);
            s = std::move(next);
            if (done) {
                status = SolveStatus::converged;
                break;
            }
        }
    } catch (const std::exception& e) {
        status = SolveStatus::diverged;
        msg = e.what();
    }
    log.finish(status, msg);
    rep.solution = s;
    rep.G = s - matcore::diag(r.b);
    attach_residual(rep, m, o.quad);
    return rep;
}

}  // namespace mmlevy
