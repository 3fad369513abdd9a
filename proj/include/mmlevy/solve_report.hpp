#pragma once

// Result and option types shared by every iterative solver.

#include <string>
#include <vector>

#include "mmlevy/matcore.hpp"
#include "mmlevy/model.hpp"
#include "mmlevy/quad_settings.hpp"

namespace mmlevy {

enum class SolveStatus { converged, max_iter, diverged, invalid_input };

std::string to_string(SolveStatus s);

enum class InnerMethod {
    sda,           ///< structured doubling (NARE path default)
    sylvester_fp,  ///< diagonal-Sylvester fixed point, monotone from zero
};

struct SolveOptions {
    double eps = 1e-14;
    int max_iter = 200;
    /// Cap for inner solves (cyclic reduction, doubling).
    int inner_max_iter = 100;
    InnerMethod inner = InnerMethod::sda;
    /// Keep every iterate (native form, X_0 first) in SolveReport::iterates.
    bool keep_iterates = false;
    QuadSettings quad{};
};

struct SolveReport {
    std::string algorithm;
    /// Native iterate at termination: W for QME-path solvers, S for the
    /// NARE path and Simon, G for Breuer.
    Matrix solution;
    Matrix G;
    int iterations = 0;
    /// ||X_{k+1} - X_k||_inf per step.
    std::vector<double> error_trace;
    /// Cumulative wall time after each step.
    std::vector<double> elapsed_trace;
    /// ||F(G)||_inf; +inf when F could not be evaluated.
    double residual = 0.0;
    double elapsed = 0.0;
    SolveStatus status = SolveStatus::invalid_input;
    std::string message;
    std::vector<Matrix> iterates;

    bool ok() const { return status == SolveStatus::converged; }
};

namespace detail {

/// Bookkeeping for one solve: timing, traces, termination.
class IterationLog {
public:
    IterationLog(SolveReport& r, const SolveOptions& o);
    /// Records a step from `prev` to `next`; returns true once converged.
    bool step(const Matrix& prev, const Matrix& next);
    void finish(SolveStatus s, std::string message = {});

private:
    SolveReport& r_;
    const SolveOptions& o_;
    double start_;
};

double now_seconds();

}  // namespace detail

/// Sets report.residual to ||F(report.G)||_inf (+inf if F cannot be evaluated).
void attach_residual(SolveReport& report, const MmLevyModel& m, const QuadSettings& s);

}  // namespace mmlevy
