#pragma once

// Markov-modulated Levy process with positive jumps: per-phase Brownian
// parameters (a, sigma^2), phase generator Q, switch-jump atoms U(0),
// within-phase jump densities nu_i and switch-jump densities mu_ij.

#include <optional>
#include <string>
#include <vector>

#include "mmlevy/density.hpp"
#include "mmlevy/matcore.hpp"
#include "mmlevy/quad_settings.hpp"

namespace mmlevy {

using DensityGrid = std::vector<std::vector<JumpDensity>>;

struct MmLevyModel {
    Vector a;
    Vector sigma2;
    Matrix Q;
    Matrix U0;
    std::vector<JumpDensity> nu;
    DensityGrid mu;

    MmLevyModel() = default;
    /// Missing U0 defaults to all ones and missing mu to no switch jumps.
    MmLevyModel(Vector a, Vector sigma2, Matrix q, std::vector<JumpDensity> nu,
                std::optional<Matrix> u0 = std::nullopt, std::optional<DensityGrid> mu = std::nullopt);

    Eigen::Index n() const { return a.size(); }

    /// rho_i = mass(nu_i)
    Vector jump_rates() const;
    /// integral of x nu_i(x)
    Vector jump_means() const;

    bool operator==(const MmLevyModel& o) const;
};

struct Violation {
    std::string code;
    std::string message;
};

/// Checks every model invariant; an empty result means the model is valid.
std::vector<Violation> validate(const MmLevyModel& m);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const MmLevyModel& m);

Vector stationary_pi(const Matrix& q);

enum class DriftRegime { negative, zero, positive };

std::string to_string(DriftRegime r);

inline constexpr double kZeroDriftBand = 1e-12;

struct DriftInfo {
    double kappa = 0.0;
    Vector pi;
    DriftRegime regime = DriftRegime::zero;
};

DriftInfo drift_kappa(const MmLevyModel& m);

/// F(Y) = D_a Y + 1/2 D_sigma2 Y^2 + int D_nu(x)(e^{Yx} - I) dx + Q o U(0)
///        + int (Q o mu(x)) e^{Yx} dx
Matrix f_residual(const MmLevyModel& m, const Matrix& y, const QuadSettings& s = {});

struct Example1Params {
    int n = 8;
    int ell = 10;
    double r1 = 2.0;
    double r2 = 1.0;
    double c = 1.5;
    double lambda = 0.1;
    double alpha = 1.0;
    double rho = -1.0;
};

struct Example2Params {
    double alpha = 1.0;
    double omega = 0.25;
    double beta = 0.5;
    double gamma = 1e-4;
    double eta = 4.0;
};

/// Phase-type law (init, T) with unit mean built from the (r1, r2, c, ell)
/// family with slowly decaying tail.
std::pair<Vector, Matrix> example1_phase_type(int ell, double r1, double r2, double c);

/// Circulant phase cycle with identical phase-type jumps in every phase.
MmLevyModel preset_example1(const Example1Params& p = {});

/// Three phases: two moderate-volatility phases with exponential switch jumps
/// between them, and a high-volatility phase with small repeated jumps.
MmLevyModel preset_example2(const Example2Params& p = {});

}  // namespace mmlevy
