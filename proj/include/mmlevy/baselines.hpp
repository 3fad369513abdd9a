#pragma once

// Two reference comparison algorithms: a Sylvester-type fixed point on the
// NARE unknown S, and a row-wise functional iteration on G that needs a
// scalar root per phase beforehand.

#include "mmlevy/model.hpp"
#include "mmlevy/solve_report.hpp"

namespace mmlevy {

/// Solves D_c S_{k+1} - S_{k+1}(S_k - D_b) = 2 D_sigma^{-2} C^(S_k).
SolveReport simon_solve(const MmLevyModel& m, const Matrix& s0, const SolveOptions& o = {});

struct BreuerPrep {
    /// |s_i| where s_i <= 0 is the minimal root of
    /// a_i s + sigma_i^2 s^2 / 2 + int (e^{sx} - 1) nu_i(x) dx = |q_ii|.
    Vector xi;
    /// Left-hand side minus |q_ii| at the computed roots.
    Vector residual;
    double prep_time = 0.0;
};

BreuerPrep breuer_prep(const MmLevyModel& m, double eps = 1e-15);

/// e_i^T G_{k+1} = -xi_i e_i^T + e_i^T M(G_k) L_i(G_k), with
/// M(V) = Q o (U(0) - I) + int (Q o mu(x)) e^{Vx} dx,
/// L_i(V) = (xi_i I + V)(|q_ii| I - Y_i(V))^{-1},
/// Y_i(V) = a_i V + sigma_i^2 V^2 / 2 + int (e^{Vx} - I) nu_i(x) dx.
SolveReport breuer_solve(const MmLevyModel& m, const BreuerPrep& prep, const Matrix& g0,
                         const SolveOptions& o = {});

}  // namespace mmlevy
