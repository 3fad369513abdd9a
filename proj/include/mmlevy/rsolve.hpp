#pragma once

// NARE path. Writing G = -D_b + D_b Psi and S = D_b Psi, the equation
// F(G) = 0 is equivalent to the fixed point S = S_min(S), where S_min(W)
// is the minimal nonnegative solution of
//     S^2 - D_c S - S D_b + 2 D_sigma^{-2} C^(W) = 0.

#include "mmlevy/model.hpp"
#include "mmlevy/solve_report.hpp"

namespace mmlevy {

struct PhaseRates {
    Vector rho;     ///< within-phase jump rate
    Vector lambda;  ///< rho + |q_ii|
    Vector b;
    Vector c;
};

PhaseRates phase_rates(const MmLevyModel& m);

/// [[D_b, -I], [-2 D_sigma^{-2} C^(W), D_c]]
Matrix nare_m_matrix(const MmLevyModel& m, const Matrix& w, const QuadSettings& s = {});

struct InnerStats {
    int iterations = 0;
    bool fell_back = false;
};

/// Minimal nonnegative solution of X^2 - D_c X - X D_b + C = 0 for a given
/// constant term C >= 0.
Matrix nare_minimal_solution(const Vector& b, const Vector& c, const Matrix& constant, InnerMethod method,
                             double eps, int max_iter, InnerStats* stats = nullptr);

/// S_min(W)
Matrix nare_inner_solve(const MmLevyModel& m, const Matrix& w, InnerMethod method, double eps, int max_iter,
                        const QuadSettings& s = {}, InnerStats* stats = nullptr);

/// S_{k+1} = S_min(S_k). Returns S in `solution`, G = S - D_b.
SolveReport nare_outer_solve(const MmLevyModel& m, const Matrix& s0, const SolveOptions& o = {});

/// Psi = D_b^{-1} S
Matrix psi_from_s(const PhaseRates& r, const Matrix& s);

}  // namespace mmlevy
