#include "mmlevy/baselines.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "mmlevy/quad.hpp"
#include "mmlevy/rsolve.hpp"

namespace mmlevy {

namespace {

SolveReport rejected(const char* name, const std::string& why) {
    SolveReport r;
    r.algorithm = name;
    r.status = SolveStatus::invalid_input;
    r.message = why;
    r.residual = std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace

SolveReport simon_solve(const MmLevyModel& m, const Matrix& s0, const SolveOptions& o) {
    if (const auto v = validate(m); !v.empty()) return rejected("simon", "invalid model: " + v.front().message);
    if (s0.rows() != m.n() || s0.cols() != m.n()) return rejected("simon", "starting matrix has the wrong dimension");
    const auto r = phase_rates(m);
    const Vector two_over_s2 = 2.0 * m.sigma2.cwiseInverse();
    const Matrix db = matcore::diag(r.b);

    SolveReport rep;
    rep.algorithm = "simon";
    detail::IterationLog log(rep, o);
    Matrix s = s0;
    SolveStatus status = SolveStatus::max_iter;
    std::string msg;
    try {
        for (int k = 0; k < o.max_iter; ++k) {
            const Matrix rhs = two_over_s2.asDiagonal() * quad::c_hat(m, s, r.b, o.quad);
            Matrix next = matcore::left_diag_sylvester_solve(r.c, s - db, rhs);
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
    rep.G = s - db;
    attach_residual(rep, m, o.quad);
    return rep;
}

namespace {

// Laplace-type value int e^{sx} d(x) dx and its s-derivative, s < decay rate.
std::pair<double, double> scalar_transform(const JumpDensity& d, double s) {
    switch (d.kind()) {
        case DensityKind::none: return {0.0, 0.0};
        case DensityKind::exponential: {
            const auto& e = d.as_exponential();
            const double den = e.rate - s;
            return {e.weight * e.rate / den, e.weight * e.rate / (den * den)};
        }
        case DensityKind::phase_type: {
            const auto& p = d.as_phase_type();
            const auto l = p.gen.rows();
            const Matrix op = -(p.gen + s * Matrix::Identity(l, l));
            const Vector exit = -(p.gen * Vector::Ones(l));
            const Vector z1 = matcore::solve_vec(op, exit, "scalar phase-type transform");
            const Vector z2 = matcore::solve_vec(op, z1, "scalar phase-type transform");
            return {p.weight * p.init.dot(z1), p.weight * p.init.dot(z2)};
        }
    }
    return {0.0, 0.0};
}

struct ScalarEquation {
    double a, s2, rate, target;
    const JumpDensity* nu;

    double value(double s) const { return a * s + 0.5 * s2 * s * s + scalar_transform(*nu, s).first - rate - target; }
    double slope(double s) const { return a + s2 * s + scalar_transform(*nu, s).second; }
};

}  // namespace

BreuerPrep breuer_prep(const MmLevyModel& m, double eps) {
    const double start = detail::now_seconds();
    const auto r = phase_rates(m);
    const auto n = m.n();
    BreuerPrep out;
    out.xi.resize(n);
    out.residual.resize(n);
    const double horizon0 = 2.0 * r.b.maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        const ScalarEquation eq{m.a(i), m.sigma2(i), r.rho(i), -m.Q(i, i), &m.nu[static_cast<std::size_t>(i)]};
        // The left side is convex in s <= 0 and vanishes at 0, so a single
        // root lies to the left once the sign changes.
        double lo = -horizon0;
        int grow = 0;
        while (!(eq.value(lo) > 0.0)) {
            lo *= 2.0;
            if (++grow > 200) throw NumericalError("breuer_prep: no sign change within the search horizon");
        }
        double hi = 0.0;
        double s = lo;
        for (int k = 0; k < 200; ++k) {
            const double f = eq.value(s);
            if (f == 0.0) break;
            (f > 0.0 ? lo : hi) = s;
            const double df = eq.slope(s);
            double next = s - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - s);
            s = next;
            if (step <= eps * std::abs(s) || hi - lo <= eps * std::abs(lo)) break;
        }
        out.xi(i) = -s;
        out.residual(i) = eq.value(s);
    }
    out.prep_time = detail::now_seconds() - start;
    return out;
}

SolveReport breuer_solve(const MmLevyModel& m, const BreuerPrep& prep, const Matrix& g0, const SolveOptions& o) {
    if (const auto v = validate(m); !v.empty()) return rejected("breuer", "invalid model: " + v.front().message);
    const auto n = m.n();
    if (g0.rows() != n || g0.cols() != n) return rejected("breuer", "starting matrix has the wrong dimension");
    if (prep.xi.size() != n) return rejected("breuer", "preprocessing does not match the model");

    const Matrix id = Matrix::Identity(n, n);
    Matrix qu_off = m.Q.cwiseProduct(m.U0);
    qu_off.diagonal().setZero();
    const Vector rates = m.jump_rates();

    SolveReport rep;
    rep.algorithm = "breuer";
    detail::IterationLog log(rep, o);
    Matrix g = g0;
    SolveStatus status = SolveStatus::max_iter;
    std::string msg;
    try {
        for (int k = 0; k < o.max_iter; ++k) {
            // Full transforms at G_k, one per distinct density.
            std::deque<std::pair<const JumpDensity*, Matrix>> cache;
            auto transform_of = [&](const JumpDensity& d) -> const Matrix& {
                for (const auto& [key, value] : cache) {
                    if (*key == d) return value;
                }
                cache.emplace_back(&d, quad::exp_transform(d, g, o.quad));
                return cache.back().second;
            };
            Matrix mk = qu_off;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    const auto& mu = m.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    if (i != j && !mu.is_none() && m.Q(i, j) != 0.0) mk.row(i) += m.Q(i, j) * transform_of(mu).row(j);
                }
            }
            const Matrix g2 = g * g;
            Matrix next(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& nu = m.nu[static_cast<std::size_t>(i)];
                Matrix yi = m.a(i) * g + 0.5 * m.sigma2(i) * g2;
                if (!nu.is_none()) yi += transform_of(nu) - rates(i) * id;
                const Eigen::RowVectorXd lead = mk.row(i) * (prep.xi(i) * id + g);
                const Matrix op = (-m.Q(i, i)) * id - yi;
                const Vector row = matcore::solve_vec(op.transpose(), lead.transpose(), "Breuer row step");
                next.row(i) = row.transpose();
                next(i, i) -= prep.xi(i);
            }
            if (!next.allFinite()) {
                status = SolveStatus::diverged;
                msg = "non-finite iterate";
                break;
            }
            const bool done = log.step(g, next);
            g = std::move(next);
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
    rep.solution = g;
    rep.G = g;
    attach_residual(rep, m, o.quad);
    return rep;
}

}  // namespace mmlevy
