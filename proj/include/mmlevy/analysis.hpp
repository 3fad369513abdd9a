#pragma once

// Convergence-rate objects at a converged G and geometric-rate estimation
// from error traces.

#include <utility>
#include <vector>

#include "mmlevy/model.hpp"

namespace mmlevy {

struct RateAnalysis {
    double tau = 0.0;
    Matrix Lambda;
    /// -2 D_a - D_sigma2 G - 2 Lambda
    Matrix Theta;
    /// Splitting Theta = M1 - N1 governing the U-based iteration.
    Matrix M1, N1;
    /// Splitting Theta = M2 - N2 governing the QME and NARE iterations.
    Matrix M2, N2;
    double rho_R = 0.0;
    double rho_Rhat = 0.0;
    bool theta_is_m_matrix = false;
    bool theta_irreducible = false;
    /// |lambda_min(Theta)| <= kThetaSingularRel * ||Theta||_inf
    bool theta_singular = false;
    /// Conditions for rho_Rhat < rho_R; reported only.
    bool rhat_irreducible = false;
    bool theta_inverse_positive = false;
};

inline constexpr double kThetaSingularRel = 1e-8;

RateAnalysis rate_objects(const MmLevyModel& m, const Matrix& g, double tau, const QuadSettings& s = {});

struct ObservedRate {
    double rate = 0.0;
    int window = 0;
    /// Coefficient of determination of the log-linear fit.
    double r2_fit = 0.0;
};

inline constexpr int kDefaultRateWindow = 10;

/// Least-squares slope of log(err) over the last `window` entries above
/// 100 * machine epsilon. Throws std::invalid_argument when too few remain.
ObservedRate observed_rate(const std::vector<double>& trace, int window = kDefaultRateWindow);

/// rho(R) at each tau for a fixed converged G.
std::vector<std::pair<double, double>> tau_rate_monotonicity(const MmLevyModel& m, const Matrix& g,
                                                             const std::vector<double>& taus,
                                                             const QuadSettings& s = {});

}  // namespace mmlevy
