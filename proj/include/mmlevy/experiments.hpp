#pragma once

// Run configuration, algorithm dispatch and table emission used by the
// command-line tool.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmlevy/analysis.hpp"
#include "mmlevy/model.hpp"
#include "mmlevy/solve_report.hpp"

namespace mmlevy::exp {

enum class Algorithm { fi, ubased, qme, nare, simon, breuer };
enum class Start { zero, identity, delta_b };

std::string to_string(Algorithm a);
std::string to_string(Start s);
Algorithm parse_algorithm(const std::string& s);
Start parse_start(const std::string& s);

inline const std::vector<Algorithm> kAllAlgorithms{Algorithm::fi,   Algorithm::ubased, Algorithm::qme,
                                                  Algorithm::nare, Algorithm::simon,  Algorithm::breuer};

struct ModelSource {
    enum class Kind { example1, example2, file };
    Kind kind = Kind::example1;
    std::filesystem::path path;
    Example1Params ex1{};
    Example2Params ex2{};
};

/// Accepts "preset:example1", "preset:example2", "example1", "example2" and "file:<path>".
ModelSource parse_source(const std::string& s);
MmLevyModel load_source(const ModelSource& src);

struct RunConfig {
    Algorithm algorithm = Algorithm::qme;
    /// Empty means 0.999999 * tau*(mean).
    std::optional<double> tau;
    Start x0 = Start::zero;
    SolveOptions opts{};
};

/// Empty when the start is compatible with the algorithm.
std::optional<std::string> start_error(Algorithm a, Start s);

/// Start that converges fastest for each algorithm (I for W-iterations,
/// D_b for S-iterations, 0 for Breuer).
Start accelerated_start(Algorithm a);

struct RunResult {
    Algorithm algorithm = Algorithm::qme;
    Start x0 = Start::zero;
    double tau = 0.0;
    DriftInfo drift;
    SolveReport report;
    std::optional<RateAnalysis> rates;
    std::optional<double> observed_rate;
    /// Breuer preprocessing time, included in cpu_s.
    double prep_time = 0.0;

    double cpu_s() const { return report.elapsed + prep_time; }
};

/// Throws std::invalid_argument on an incompatible start; solver failures
/// are reported through RunResult::report.status.
RunResult run(const MmLevyModel& m, const RunConfig& cfg, bool with_rates = true);

std::string trace_csv(const RunResult& r);
std::string summary_json(const RunResult& r);

struct CompareRow {
    RunResult run;
    double max_pairwise_diff = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    double max_pairwise_diff = 0.0;
};

enum class StartPolicy { zero, accelerated };

/// Runs every algorithm once per policy; the pairwise difference is taken
/// over converged runs only.
CompareResult compare(const MmLevyModel& m, const std::vector<Algorithm>& algs,
                      const std::vector<StartPolicy>& policies, const RunConfig& base);
std::string compare_csv(const CompareResult& c);

struct TauRow {
    double tau = 0.0;
    bool admissible = false;
    double residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::invalid_input;
};

std::vector<TauRow> tau_sweep(const MmLevyModel& m, const std::vector<double>& taus, const RunConfig& base);
std::string tau_sweep_csv(const std::vector<TauRow>& rows);

struct ScalingRow {
    int n = 0;
    Algorithm alg = Algorithm::qme;
    double cpu_s = 0.0;
    double residual = 0.0;
    SolveStatus status = SolveStatus::invalid_input;
};

/// Example 1 at each n for QME and Simon; cpu_s is the best of `repeats` runs.
std::vector<ScalingRow> scaling(const std::vector<int>& ns, const Example1Params& base_params, const RunConfig& base,
                                int repeats = 1);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

/// Shortest decimal that round-trips; "inf", "-inf" or "nan" otherwise.
std::string fmt(double v);

}  // namespace mmlevy::exp
