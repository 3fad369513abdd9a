#include "mmlevy/solve_report.hpp"

#include <chrono>
#include <limits>

namespace mmlevy {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::invalid_input: return "invalid_input";
    }
    return "unknown";
}

void attach_residual(SolveReport& report, const MmLevyModel& m, const QuadSettings& s) {
    report.residual = std::numeric_limits<double>::infinity();
    if (report.G.size() == 0 || !report.G.allFinite()) return;
    try {
        report.residual = matcore::inf_norm(f_residual(m, report.G, s));
    } catch (const std::exception&) {
        // left at +inf
    }
}

namespace detail {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

IterationLog::IterationLog(SolveReport& r, const SolveOptions& o) : r_(r), o_(o), start_(now_seconds()) {
    r_.iterations = 0;
    r_.error_trace.clear();
    r_.elapsed_trace.clear();
    r_.iterates.clear();
}

bool IterationLog::step(const Matrix& prev, const Matrix& next) {
    const double err = matcore::inf_norm(next - prev);
    ++r_.iterations;
    r_.error_trace.push_back(err);
    r_.elapsed_trace.push_back(now_seconds() - start_);
    if (o_.keep_iterates) {
        if (r_.iterates.empty()) r_.iterates.push_back(prev);
        r_.iterates.push_back(next);
    }
    return err <= o_.eps;
}

void IterationLog::finish(SolveStatus s, std::string message) {
    r_.status = s;
    r_.message = std::move(message);
    r_.elapsed = now_seconds() - start_;
}

}  // namespace detail
}  // namespace mmlevy
