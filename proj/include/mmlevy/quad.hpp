#pragma once

// Matrix-valued improper integrals of the form int_0^inf w(x) e^{Yx} dx.
//
// Two evaluation paths exist for every transform. The closed-form path uses
// (eta I - Y)^{-1} for exponential weights and a Kronecker-sum solve
// -(T (+) Y)^{-1} for phase-type weights. The adaptive path integrates the
// same weight numerically with Gauss-Kronrod panels on [0, X_max], where
// X_max is chosen from the explicit tail of the weight.

#include <functional>

#include "mmlevy/density.hpp"
#include "mmlevy/matcore.hpp"
#include "mmlevy/model.hpp"
#include "mmlevy/quad_settings.hpp"

namespace mmlevy::quad {

/// Which scalar weight multiplies e^{Yx}.
enum class Weight {
    density,    ///< d(x)
    tail_mass,  ///< int_x^inf d(u) du
};

struct AdaptiveStats {
    int panels = 0;
    double error_estimate = 0.0;
    double upper_limit = 0.0;
};

/// Adaptive 7/15-point Gauss-Kronrod integration of a matrix-valued function
/// over [lo, hi], refining the panel with the largest max-norm error estimate
/// until the total estimate is below max(abs_tol, rel_tol * |result|_max).
/// `breakpoints` (strictly inside (lo, hi), increasing) seed the initial panels.
Matrix integrate(const std::function<Matrix(double)>& f, double lo, double hi,
                 const QuadSettings& s, const std::vector<double>& breakpoints = {},
                 AdaptiveStats* stats = nullptr);

/// Smallest X = 2^k >= 1 with the neglected tail below s.truncation_tail.
double truncation_point(const JumpDensity& d, Weight w, const Matrix& y, const QuadSettings& s);

/// int_0^inf d(x) e^{Yx} dx
Matrix exp_transform(const JumpDensity& d, const Matrix& y, const QuadSettings& s = {});

/// int_0^inf (int_x^inf d) e^{Yx} dx
Matrix tail_transform(const JumpDensity& d, const Matrix& y, const QuadSettings& s = {});

/// Dispatch on method; exposed separately so the two paths can be compared.
Matrix transform_closed_form(const JumpDensity& d, Weight w, const Matrix& y);
Matrix transform_adaptive(const JumpDensity& d, Weight w, const Matrix& y, const QuadSettings& s,
                          AdaptiveStats* stats = nullptr);

/// Row-assembled jump integrals of a model at exponent Y:
///   within.row(i)    = e_i^T T_{nu_i}(Y)
///   switching.row(i) = sum_{j != i} q_ij e_j^T T_{mu_ij}(Y)
/// where T_d is exp_transform (Weight::density) or tail_transform.
struct JumpTerms {
    Matrix within;
    Matrix switching;
};

JumpTerms jump_terms(const MmLevyModel& m, const Matrix& y, Weight w, const QuadSettings& s = {});

/// H(tau, W) = int D_nu(x) (e^{tau^{-1}(W - I)x} - I) dx
Matrix h_of(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s = {});

/// K(tau, W) = Q o U(0) + int (Q o mu(x)) e^{tau^{-1}(W - I)x} dx
Matrix k_of(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s = {});

/// H + K evaluated in one pass (shares the transforms).
Matrix h_plus_k(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s = {});

/// C^(X) = (Q - D_q) o U(0) + int D_nu(x) e^{(X - D_b)x} dx
///        + int (Q o mu(x)) e^{(X - D_b)x} dx
Matrix c_hat(const MmLevyModel& m, const Matrix& x, const Vector& b, const QuadSettings& s = {});

/// Lambda = int D_nu(x) int_0^x e^{Gs} ds dx + int (Q o mu(x)) int_0^x e^{Gs} ds dx,
/// evaluated as tail-mass transforms at G.
Matrix lambda_of(const MmLevyModel& m, const Matrix& g, const QuadSettings& s = {});

}  // namespace mmlevy::quad
