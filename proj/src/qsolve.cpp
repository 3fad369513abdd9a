#include "mmlevy/qsolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmlevy/quad.hpp"

namespace mmlevy {

namespace {

// Positive root of A t^2 + B t + C with A < 0 < C, in cancellation-free form.
double positive_root(double a2, double b1, double c0) {
    const double disc = b1 * b1 - 4.0 * a2 * c0;
    return 2.0 * c0 / (-b1 + std::sqrt(disc));
}

}  // namespace

double tau_star(const MmLevyModel& m, TauBound bound) {
    require_valid(m);
    const Vector rates = m.jump_rates();
    const Vector means = m.jump_means();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        const double a = m.a(i);
        const double s2 = m.sigma2(i);
        const double q = m.Q(i, i);
        if (a > 0.0) best = std::min(best, s2 / a);
        const double root = bound == TauBound::basic ? positive_root(2.0 * (q - rates(i)), -2.0 * a, s2)
                                                     : positive_root(2.0 * q, -(2.0 * a + means(i)), s2);
        best = std::min(best, root);
    }
    return best;
}

double tau_admissible_limit(const MmLevyModel& m) {
    return std::max(tau_star(m, TauBound::basic), tau_star(m, TauBound::mean));
}

double tau_auto(const MmLevyModel& m) { return kTauSafety * tau_star(m, TauBound::mean); }

QmeSystem::QmeSystem(MmLevyModel m, double tau, QuadSettings s) : m_(std::move(m)), tau_(tau), s_(s) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("QmeSystem: tau must be positive");
    const Vector b0 = 2.0 * (tau * m_.a - m_.sigma2);
    if ((b0.array() >= 0.0).any()) {
        throw std::invalid_argument("QmeSystem: tau makes a diagonal entry of B0 nonnegative");
    }
    b1_ = matcore::diag(m_.sigma2);
    b0_ = matcore::diag(b0);
    neg_b0_inv_ = (-b0).cwiseInverse();
    bt1_ = neg_b0_inv_.asDiagonal() * b1_;
}

Matrix QmeSystem::Bm1(const Matrix& w) const {
    Matrix out = 2.0 * tau_ * tau_ * quad::h_plus_k(m_, tau_, w, s_);
    out.diagonal() += m_.sigma2 - 2.0 * tau_ * m_.a;
    return out;
}

Matrix QmeSystem::Btm1(const Matrix& w) const { return neg_b0_inv_.asDiagonal() * Bm1(w); }

Matrix QmeSystem::g_from_w(const Matrix& w) const {
    return (w - Matrix::Identity(w.rows(), w.cols())) / tau_;
}

Matrix QmeSystem::w_from_g(const Matrix& g) const {
    return Matrix::Identity(g.rows(), g.cols()) + tau_ * g;
}

namespace {

template <class Step>
SolveReport run_w_iteration(const char* name, const MmLevyModel& m, double tau, const Matrix& w0,
                            const SolveOptions& o, Step step) {
    SolveReport r;
    r.algorithm = name;
    detail::IterationLog log(r, o);
    const auto n = m.n();
    auto fail = [&](const std::string& why) {
        log.finish(SolveStatus::invalid_input, why);
        r.residual = std::numeric_limits<double>::infinity();
        return r;
    };
    if (const auto v = validate(m); !v.empty()) return fail("invalid model: " + v.front().message);
    if (w0.rows() != n || w0.cols() != n) return fail("starting matrix has the wrong dimension");
    const double limit = tau_admissible_limit(m);
    if (!(tau > 0.0) || !(tau < limit)) {
        return fail("tau = " + std::to_string(tau) + " outside the admissible interval (0, " +
                    std::to_string(limit) + ")");
    }
    const QmeSystem sys(m, tau, o.quad);

    Matrix w = w0;
    SolveStatus status = SolveStatus::max_iter;
    std::string msg;
    try {
        for (int k = 0; k < o.max_iter; ++k) {
            Matrix next = step(sys, w);
            if (!next.allFinite()) {
                status = SolveStatus::diverged;
                msg = "non-finite iterate";
                break;
            }
            const bool done = log.step(w, next);
            w = std::move(next);
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
    r.solution = w;
    r.G = sys.g_from_w(w);
    attach_residual(r, m, o.quad);
    return r;
}

}  // namespace

SolveReport fi_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o) {
    return run_w_iteration("fi", m, tau, w0, o, [](const QmeSystem& sys, const Matrix& w) -> Matrix {
        return sys.Btm1(w) + sys.Bt1() * (w * w);
    });
}

SolveReport u_based_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o) {
    return run_w_iteration("ubased", m, tau, w0, o, [](const QmeSystem& sys, const Matrix& w) -> Matrix {
        const Matrix step = Matrix::Identity(w.rows(), w.cols()) - sys.Bt1() * w;
        return matcore::solve(step, sys.Btm1(w), "U-based step");
    });
}

namespace {

constexpr int kFallbackBudget = 100000;

Matrix frozen_fixed_point(const Matrix& bm1, const Matrix& bt1, Matrix v, double eps) {
    for (int k = 0; k < kFallbackBudget; ++k) {
        Matrix next = bm1 + bt1 * (v * v);
        const double err = matcore::inf_norm(next - v);
        v = std::move(next);
        if (!v.allFinite()) break;
        if (err <= eps) return v;
    }
    throw NumericalError("cr_solve: fixed-point fallback did not converge");
}

}  // namespace

Matrix cr_solve(const Matrix& bm1, const Matrix& bt1, double eps, int max_iter, CrStats* stats) {
    matcore::require_square(bm1, "cr_solve");
    matcore::require_square(bt1, "cr_solve");
    const auto n = bm1.rows();
    if (bt1.rows() != n) throw std::invalid_argument("cr_solve: dimension mismatch");
    CrStats local;
    CrStats& st = stats ? *stats : local;
    st = CrStats{};

    const Matrix id = Matrix::Identity(n, n);
    Matrix am1 = bm1;
    Matrix a0 = -id;
    Matrix a1 = bt1;
    Matrix ahat = -id;
    Matrix last_ahat = ahat;
    bool converged = false;
    try {
        for (int k = 0; k < max_iter; ++k) {
            last_ahat = ahat;
            ++st.iterations;
            const Matrix kinv = matcore::solve(a0, id, "cyclic reduction pivot");
            const Matrix ka_m = kinv * am1;
            const Matrix ka_p = kinv * a1;
            const Matrix up = a1 * ka_m;
            const Matrix down = am1 * ka_p;
            ahat -= up;
            a0 -= down + up;
            am1 = -(am1 * ka_m);
            a1 = -(a1 * ka_p);
            if (!ahat.allFinite() || !a0.allFinite()) break;
            if (matcore::inf_norm(up) <= eps * matcore::inf_norm(ahat)) {
                converged = true;
                break;
            }
        }
    } catch (const NumericalError&) {
        converged = false;
    }

    Matrix v;
    if (converged) {
        try {
            v = -matcore::solve(ahat, bm1, "cyclic reduction solution");
        } catch (const NumericalError&) {
            converged = false;
        }
    }
    if (converged && v.allFinite()) return v;

    // Near-critical problems drive the pivot singular; the last finite
    // estimate is still a good warm start for the fixed point.
    st.fell_back = true;
    Matrix start = Matrix::Zero(n, n);
    if (v.size() != n * n || !v.allFinite()) {
        try {
            if (last_ahat.allFinite()) v = -matcore::solve(last_ahat, bm1, "cyclic reduction estimate");
        } catch (const NumericalError&) {
            v.resize(0, 0);
        }
    }
    if (v.size() == n * n && v.allFinite()) start = v.cwiseMax(0.0);
    return frozen_fixed_point(bm1, bt1, start, eps);
}

SolveReport qme_outer_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o) {
    return run_w_iteration("qme", m, tau, w0, o, [&o](const QmeSystem& sys, const Matrix& w) -> Matrix {
        return cr_solve(sys.Btm1(w), sys.Bt1(), o.eps, o.inner_max_iter);
    });
}

}  // namespace mmlevy
