#pragma once

// Quadratic-matrix-equation path. With W = I + tau G the equation F(G) = 0
// becomes B_{-1}(tau, W) + B_0(tau) W + B_1 W^2 = 0, whose minimal
// nonnegative solution W_min gives G = tau^{-1}(W_min - I).

#include "mmlevy/model.hpp"
#include "mmlevy/solve_report.hpp"

namespace mmlevy {

enum class TauBound {
    basic,  ///< uses the jump rate of each phase
    mean,   ///< uses the mean jump size of each phase
};

/// Upper end of the admissible step interval (0, tau*) for one bound.
double tau_star(const MmLevyModel& m, TauBound bound);

/// Both bounds are sufficient, so tau is admissible below the larger one.
double tau_admissible_limit(const MmLevyModel& m);

inline constexpr double kTauSafety = 0.999999;

/// kTauSafety * tau_star(mean)
double tau_auto(const MmLevyModel& m);

class QmeSystem {
public:
    QmeSystem(MmLevyModel m, double tau, QuadSettings s = {});

    double tau() const { return tau_; }
    const MmLevyModel& model() const { return m_; }

    /// D_sigma2
    const Matrix& B1() const { return b1_; }
    /// 2(tau D_a - D_sigma2)
    const Matrix& B0() const { return b0_; }
    /// D_sigma2 - 2 tau D_a + 2 tau^2 (H(tau, W) + K(tau, W))
    Matrix Bm1(const Matrix& w) const;

    /// -B0^{-1} B1
    const Matrix& Bt1() const { return bt1_; }
    /// -B0^{-1} B_{-1}(tau, W)
    Matrix Btm1(const Matrix& w) const;

    Matrix g_from_w(const Matrix& w) const;
    Matrix w_from_g(const Matrix& g) const;

private:
    MmLevyModel m_;
    double tau_;
    QuadSettings s_;
    Matrix b1_;
    Matrix b0_;
    Matrix bt1_;
    Vector neg_b0_inv_;
};

/// W_{k+1} = Bt_{-1}(W_k) + Bt_1 W_k^2
SolveReport fi_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o = {});

/// W_{k+1} = (I - Bt_1 W_k)^{-1} Bt_{-1}(W_k)
SolveReport u_based_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o = {});

struct CrStats {
    int iterations = 0;
    bool fell_back = false;
};

/// Minimal nonnegative solution of V = Bm1 + Bt1 V^2 by cyclic reduction,
/// finishing with functional iteration if reduction breaks down or stalls.
Matrix cr_solve(const Matrix& bm1, const Matrix& bt1, double eps = 1e-14, int max_iter = 100,
                CrStats* stats = nullptr);

/// W_{k+1} = minimal solution of V = Bt_{-1}(W_k) + Bt_1 V^2
SolveReport qme_outer_solve(const MmLevyModel& m, double tau, const Matrix& w0, const SolveOptions& o = {});

}  // namespace mmlevy
