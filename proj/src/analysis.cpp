#include "mmlevy/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmlevy/qsolve.hpp"
#include "mmlevy/quad.hpp"

namespace mmlevy {

namespace {

double min_abs_eigenvalue(const Matrix& a) {
    const ComplexVector ev = matcore::eigenvalues(a);
    return ev.cwiseAbs().minCoeff();
}

double rho_of_splitting(const Matrix& mm, const Matrix& nn) {
    return matcore::spectral_radius(matcore::solve(mm, nn, "splitting"));
}

}  // namespace

RateAnalysis rate_objects(const MmLevyModel& m, const Matrix& g, double tau, const QuadSettings& s) {
    if (!(tau > 0.0)) throw std::invalid_argument("rate_objects: tau must be positive");
    const auto n = m.n();
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument("rate_objects: dimension mismatch");
    RateAnalysis r;
    r.tau = tau;
    r.Lambda = quad::lambda_of(m, g, s);
    r.M2 = -2.0 * matcore::diag(m.a) - m.sigma2.asDiagonal() * g;
    r.N2 = 2.0 * r.Lambda;
    r.Theta = r.M2 - r.N2;
    r.M1 = r.M2 + matcore::diag(m.sigma2) / tau;
    r.N1 = r.N2 + matcore::diag(m.sigma2) / tau;
    r.rho_R = rho_of_splitting(r.M1, r.N1);
    r.rho_Rhat = rho_of_splitting(r.M2, r.N2);

    const auto rep = matcore::structure_check(r.Theta);
    r.theta_is_m_matrix = rep.is_m_matrix;
    r.theta_irreducible = rep.is_irreducible;
    r.theta_singular = min_abs_eigenvalue(r.Theta) <= kThetaSingularRel * matcore::inf_norm(r.Theta);
    r.rhat_irreducible = matcore::is_irreducible(matcore::solve(r.M2, r.N2, "splitting"));
    if (!r.theta_singular) {
        const Matrix inv = matcore::solve(r.Theta, Matrix::Identity(n, n), "Theta inverse");
        r.theta_inverse_positive = inv.minCoeff() > 0.0;
    }
    return r;
}

ObservedRate observed_rate(const std::vector<double>& trace, int window) {
    if (window < 3) throw std::invalid_argument("observed_rate: window must be at least 3");
    const double floor = 100.0 * std::numeric_limits<double>::epsilon();
    // Trailing entries above the roundoff floor, in order.
    std::size_t end = trace.size();
    while (end > 0 && !(trace[end - 1] > floor)) --end;
    std::vector<double> ys;
    for (std::size_t k = end; k > 0 && ys.size() < static_cast<std::size_t>(window); --k) {
        if (!(trace[k - 1] > floor)) break;
        ys.push_back(std::log(trace[k - 1]));
    }
    if (ys.size() < static_cast<std::size_t>(window)) {
        throw std::invalid_argument("observed_rate: fewer than " + std::to_string(window) +
                                    " trace entries above the roundoff floor");
    }
    std::reverse(ys.begin(), ys.end());
    const double cnt = static_cast<double>(ys.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        mx += static_cast<double>(k);
        my += ys[k];
    }
    mx /= cnt;
    my /= cnt;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const double dx = static_cast<double>(k) - mx;
        const double dy = ys[k] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) throw std::invalid_argument("observed_rate: trace is not decreasing");
    ObservedRate out;
    out.rate = std::exp(slope);
    out.window = window;
    out.r2_fit = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return out;
}

std::vector<std::pair<double, double>> tau_rate_monotonicity(const MmLevyModel& m, const Matrix& g,
                                                             const std::vector<double>& taus,
                                                             const QuadSettings& s) {
    const double limit = tau_admissible_limit(m);
    std::vector<std::pair<double, double>> out;
    out.reserve(taus.size());
    for (double t : taus) {
        if (!(t > 0.0) || !(t < limit)) {
            throw std::invalid_argument("tau_rate_monotonicity: tau = " + std::to_string(t) + " is not admissible");
        }
        out.emplace_back(t, rate_objects(m, g, t, s).rho_R);
    }
    return out;
}

}  // namespace mmlevy
