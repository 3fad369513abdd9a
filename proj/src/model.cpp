#include "mmlevy/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mmlevy/quad.hpp"

namespace mmlevy {

MmLevyModel::MmLevyModel(Vector a_, Vector sigma2_, Matrix q, std::vector<JumpDensity> nu_,
                         std::optional<Matrix> u0, std::optional<DensityGrid> mu_)
    : a(std::move(a_)), sigma2(std::move(sigma2_)), Q(std::move(q)), nu(std::move(nu_)) {
    const auto n = a.size();
    U0 = u0 ? std::move(*u0) : Matrix::Ones(n, n);
    if (mu_) {
        mu = std::move(*mu_);
    } else {
        mu.assign(static_cast<std::size_t>(n), std::vector<JumpDensity>(static_cast<std::size_t>(n)));
    }
}

Vector MmLevyModel::jump_rates() const {
    Vector r(n());
    for (Eigen::Index i = 0; i < n(); ++i) r(i) = nu[static_cast<std::size_t>(i)].mass();
    return r;
}

Vector MmLevyModel::jump_means() const {
    Vector r(n());
    for (Eigen::Index i = 0; i < n(); ++i) r(i) = nu[static_cast<std::size_t>(i)].mean();
    return r;
}

namespace {

bool same_shape(const Matrix& x, const Matrix& y) { return x.rows() == y.rows() && x.cols() == y.cols(); }

}  // namespace

bool MmLevyModel::operator==(const MmLevyModel& o) const {
    return a.size() == o.a.size() && sigma2.size() == o.sigma2.size() && same_shape(Q, o.Q) &&
           same_shape(U0, o.U0) && a == o.a && sigma2 == o.sigma2 && Q == o.Q && U0 == o.U0 &&
           nu == o.nu && mu == o.mu;
}

std::vector<Violation> validate(const MmLevyModel& m) {
    std::vector<Violation> out;
    auto flag = [&](std::string code, std::string msg) { out.push_back({std::move(code), std::move(msg)}); };

    const auto n = m.a.size();
    const auto un = static_cast<std::size_t>(n);
    if (n < 2) flag("dimension", "at least two phases are required");
    if (m.sigma2.size() != n || m.Q.rows() != n || m.Q.cols() != n || m.U0.rows() != n ||
        m.U0.cols() != n || m.nu.size() != un || m.mu.size() != un) {
        flag("dimension", "a, sigma2, Q, U0, nu and mu must all have n = " + std::to_string(n) + " phases");
        return out;
    }
    for (const auto& row : m.mu) {
        if (row.size() != un) {
            flag("dimension", "mu must be an n x n grid");
            return out;
        }
    }
    if (!m.a.allFinite() || !m.sigma2.allFinite() || !m.Q.allFinite() || !m.U0.allFinite()) {
        flag("finite", "model contains non-finite numbers");
        return out;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(m.sigma2(i) > 0.0)) {
            flag("sigma positive", "sigma2[" + std::to_string(i) + "] must be positive");
        }
    }

    const double tol = 1e-12;
    const auto rep = matcore::structure_check(m.Q, tol);
    if (!rep.is_generator) flag("generator", "Q must have nonnegative off-diagonal entries and zero row sums");
    if (!matcore::is_irreducible(m.Q)) flag("irreducible", "Q must be irreducible");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(m.U0(i, i) - 1.0) > tol) {
            flag("U0 diagonal", "U0[" + std::to_string(i) + "][" + std::to_string(i) + "] must be 1");
        }
        if (!m.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].is_none()) {
            flag("mu diagonal", "mu[" + std::to_string(i) + "][" + std::to_string(i) + "] must be none");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::string at = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            const double u = m.U0(i, j);
            if (u < -tol || u > 1.0 + tol) flag("U0 range", "U0" + at + " must lie in [0, 1]");
            if (i == j) continue;
            const double mass = m.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].mass();
            if (std::abs(m.Q(i, j) * (u + mass - 1.0)) > tol) {
                flag("jump mass identity",
                     "q" + at + " * (U0" + at + " + mass(mu" + at + ")) must equal q" + at);
            }
        }
    }
    return out;
}

void require_valid(const MmLevyModel& m) {
    const auto v = validate(m);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& e : v) os << "\n  [" << e.code << "] " << e.message;
    throw std::invalid_argument(os.str());
}

Vector stationary_pi(const Matrix& q) {
    matcore::require_square(q, "stationary_pi");
    const auto n = q.rows();
    if (!matcore::structure_check(q, 1e-12).is_generator || !matcore::is_irreducible(q)) {
        throw std::invalid_argument("stationary_pi: Q must be an irreducible generator");
    }
    // Replace one balance equation by the normalisation.
    Matrix sys = q.transpose();
    sys.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    return matcore::solve_vec(sys, rhs, "stationary_pi");
}

std::string to_string(DriftRegime r) {
    switch (r) {
        case DriftRegime::negative: return "negative";
        case DriftRegime::zero: return "zero";
        case DriftRegime::positive: return "positive";
    }
    return "unknown";
}

DriftInfo drift_kappa(const MmLevyModel& m) {
    require_valid(m);
    const auto n = m.n();
    Vector rate = m.a + m.jump_means();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) rate(i) += m.Q(i, j) * m.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].mean();
        }
    }
    DriftInfo info;
    info.pi = stationary_pi(m.Q);
    info.kappa = info.pi.dot(rate);
    info.regime = std::abs(info.kappa) <= kZeroDriftBand ? DriftRegime::zero
                  : info.kappa < 0.0                     ? DriftRegime::negative
                                                         : DriftRegime::positive;
    return info;
}

Matrix f_residual(const MmLevyModel& m, const Matrix& y, const QuadSettings& s) {
    const auto terms = quad::jump_terms(m, y, quad::Weight::density, s);
    return m.a.asDiagonal() * y + 0.5 * (m.sigma2.asDiagonal() * (y * y)) + terms.within -
           matcore::diag(m.jump_rates()) + m.Q.cwiseProduct(m.U0) + terms.switching;
}

std::pair<Vector, Matrix> example1_phase_type(int ell, double r1, double r2, double c) {
    if (ell < 2) throw std::invalid_argument("example1: ell must be at least 2");
    if (!(r1 > 1.0) || !(r2 > 0.0) || !(r1 > r2)) throw std::invalid_argument("example1: need r1 > 1 and r1 > r2 > 0");
    if (!(c > 0.0)) throw std::invalid_argument("example1: c must be positive");
    Matrix t = Matrix::Zero(ell, ell);
    double s = 0.0;
    for (int k = 1; k < ell; ++k) {
        const double out = std::pow(1.0 / r1, k);
        const double back = std::pow(r2 / r1, k);
        t(0, k) = out;
        t(k, 0) = back;
        t(k, k) = -back;
        s += out;
    }
    t(0, 0) = -(c + s);
    Vector init = Vector::Zero(ell);
    init(0) = 1.0;
    const Vector ones = Vector::Ones(ell);
    const double scale = -init.dot(matcore::solve_vec(t, ones, "example1 phase-type"));
    return {init, scale * t};
}

MmLevyModel preset_example1(const Example1Params& p) {
    if (p.n < 2) throw std::invalid_argument("example1: n must be at least 2");
    if (!(p.rho < 0.0)) throw std::invalid_argument("example1: rho must be negative");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("example1: alpha must be positive");
    if (!(p.lambda >= 0.0)) throw std::invalid_argument("example1: lambda must be nonnegative");
    const auto [init, gen] = example1_phase_type(p.ell, p.r1, p.r2, p.c);
    Matrix q = Matrix::Zero(p.n, p.n);
    for (int i = 0; i < p.n; ++i) {
        q(i, i) = -p.alpha;
        q(i, (i + 1) % p.n) += p.alpha;
    }
    const auto jumps = p.lambda > 0.0 ? JumpDensity::phase_type(init, gen, p.lambda) : JumpDensity::none();
    return MmLevyModel(Vector::Constant(p.n, p.rho), Vector::Ones(p.n), q,
                       std::vector<JumpDensity>(static_cast<std::size_t>(p.n), jumps));
}

MmLevyModel preset_example2(const Example2Params& p) {
    if (!(p.eta > 2.0)) throw std::invalid_argument("example2: eta must exceed 2");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("example2: gamma must be positive");
    if (!(p.alpha > 0.0) || !(p.omega > 0.0) || !(p.beta > 0.0)) {
        throw std::invalid_argument("example2: alpha, omega, beta must be positive");
    }
    Matrix q(3, 3);
    q << -p.alpha - p.omega, p.alpha, p.omega,
         p.alpha, -p.alpha - p.omega, p.omega,
         p.beta, p.beta, -2.0 * p.beta;
    Vector a(3);
    a << -2.0, 1.0, -p.gamma;
    Vector sigma2(3);
    sigma2 << 1.0, 1.0, 100.0;
    Matrix u0 = Matrix::Ones(3, 3);
    u0(0, 1) = 0.0;
    u0(1, 0) = 0.0;
    DensityGrid mu(3, std::vector<JumpDensity>(3));
    mu[0][1] = JumpDensity::exponential(p.eta);
    mu[1][0] = JumpDensity::exponential(p.eta);
    std::vector<JumpDensity> nu{JumpDensity::none(), JumpDensity::none(), JumpDensity::exponential(1.0, p.gamma)};
    return MmLevyModel(a, sigma2, q, std::move(nu), u0, std::move(mu));
}

}  // namespace mmlevy
