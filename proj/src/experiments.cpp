#include "mmlevy/experiments.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mmlevy/baselines.hpp"
#include "mmlevy/model_io.hpp"
#include "mmlevy/qsolve.hpp"
#include "mmlevy/rsolve.hpp"

namespace mmlevy::exp {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::fi: return "fi";
        case Algorithm::ubased: return "ubased";
        case Algorithm::qme: return "qme";
        case Algorithm::nare: return "nare";
        case Algorithm::simon: return "simon";
        case Algorithm::breuer: return "breuer";
    }
    return "unknown";
}

std::string to_string(Start s) {
    switch (s) {
        case Start::zero: return "zero";
        case Start::identity: return "identity";
        case Start::delta_b: return "delta_b";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
    for (auto a : kAllAlgorithms) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown algorithm '" + s + "' (fi, ubased, qme, nare, simon, breuer)");
}

Start parse_start(const std::string& s) {
    for (auto v : {Start::zero, Start::identity, Start::delta_b}) {
        if (to_string(v) == s) return v;
    }
    throw std::invalid_argument("unknown start '" + s + "' (zero, identity, delta_b)");
}

ModelSource parse_source(const std::string& s) {
    ModelSource src;
    if (s == "preset:example1" || s == "example1") {
        src.kind = ModelSource::Kind::example1;
    } else if (s == "preset:example2" || s == "example2") {
        src.kind = ModelSource::Kind::example2;
    } else if (s.rfind("file:", 0) == 0 && s.size() > 5) {
        src.kind = ModelSource::Kind::file;
        src.path = s.substr(5);
    } else {
        throw std::invalid_argument("unknown model source '" + s + "' (preset:example1, preset:example2, file:<path>)");
    }
    return src;
}

MmLevyModel load_source(const ModelSource& src) {
    switch (src.kind) {
        case ModelSource::Kind::example1: return preset_example1(src.ex1);
        case ModelSource::Kind::example2: return preset_example2(src.ex2);
        case ModelSource::Kind::file: return load_model(src.path);
    }
    throw std::invalid_argument("unknown model source");
}

std::optional<std::string> start_error(Algorithm a, Start s) {
    if (s == Start::zero) return std::nullopt;
    const bool w_path = a == Algorithm::fi || a == Algorithm::ubased || a == Algorithm::qme;
    const bool s_path = a == Algorithm::nare || a == Algorithm::simon;
    if (s == Start::identity && w_path) return std::nullopt;
    if (s == Start::delta_b && s_path) return std::nullopt;
    return "start '" + to_string(s) + "' is not available for algorithm '" + to_string(a) + "'";
}

Start accelerated_start(Algorithm a) {
    switch (a) {
        case Algorithm::fi:
        case Algorithm::ubased:
        case Algorithm::qme: return Start::identity;
        case Algorithm::nare:
        case Algorithm::simon: return Start::delta_b;
        case Algorithm::breuer: return Start::zero;
    }
    return Start::zero;
}

RunResult run(const MmLevyModel& m, const RunConfig& cfg, bool with_rates) {
    if (auto err = start_error(cfg.algorithm, cfg.x0)) throw std::invalid_argument(*err);
    RunResult out;
    out.algorithm = cfg.algorithm;
    out.x0 = cfg.x0;
    out.drift = drift_kappa(m);
    out.tau = cfg.tau.value_or(tau_auto(m));

    const auto n = m.n();
    Matrix x0 = Matrix::Zero(n, n);
    if (cfg.x0 == Start::identity) x0.setIdentity();
    if (cfg.x0 == Start::delta_b) x0 = matcore::diag(phase_rates(m).b);

    const auto& o = cfg.opts;
    switch (cfg.algorithm) {
        case Algorithm::fi: out.report = fi_solve(m, out.tau, x0, o); break;
        case Algorithm::ubased: out.report = u_based_solve(m, out.tau, x0, o); break;
        case Algorithm::qme: out.report = qme_outer_solve(m, out.tau, x0, o); break;
        case Algorithm::nare: out.report = nare_outer_solve(m, x0, o); break;
        case Algorithm::simon: out.report = simon_solve(m, x0, o); break;
        case Algorithm::breuer: {
            const auto prep = breuer_prep(m);
            out.prep_time = prep.prep_time;
            out.report = breuer_solve(m, prep, x0, o);
            break;
        }
    }

    if (with_rates && out.report.ok()) {
        try {
            out.rates = rate_objects(m, out.report.G, out.tau, o.quad);
        } catch (const std::exception&) {
            out.rates.reset();
        }
    }
    try {
        out.observed_rate = observed_rate(out.report.error_trace).rate;
    } catch (const std::invalid_argument&) {
        out.observed_rate.reset();
    }
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trace_csv(const RunResult& r) {
    std::ostringstream os;
    os << "iter,err_inf,elapsed_s\n";
    const auto& rep = r.report;
    for (std::size_t k = 0; k < rep.error_trace.size(); ++k) {
        os << (k + 1) << ',' << fmt(rep.error_trace[k]) << ',' << fmt(rep.elapsed_trace[k]) << '\n';
    }
    return os.str();
}

namespace {

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json opt_num(const std::optional<double>& v) { return v ? num(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string summary_json(const RunResult& r) {
    nlohmann::json j;
    j["algorithm"] = to_string(r.algorithm);
    j["x0"] = to_string(r.x0);
    j["tau"] = num(r.tau);
    j["kappa"] = num(r.drift.kappa);
    j["regime"] = to_string(r.drift.regime);
    j["iterations"] = r.report.iterations;
    j["residual_inf"] = num(r.report.residual);
    j["rho_R"] = r.rates ? num(r.rates->rho_R) : nlohmann::json(nullptr);
    j["rho_Rhat"] = r.rates ? num(r.rates->rho_Rhat) : nlohmann::json(nullptr);
    j["observed_rate"] = opt_num(r.observed_rate);
    j["status"] = to_string(r.report.status);
    j["message"] = r.report.message;
    j["elapsed_s"] = num(r.cpu_s());
    nlohmann::json g = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.report.G.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < r.report.G.cols(); ++k) row.push_back(num(r.report.G(i, k)));
        g.push_back(std::move(row));
    }
    j["G"] = std::move(g);
    return j.dump(2) + "\n";
}

CompareResult compare(const MmLevyModel& m, const std::vector<Algorithm>& algs,
                      const std::vector<StartPolicy>& policies, const RunConfig& base) {
    CompareResult out;
    for (auto policy : policies) {
        for (auto a : algs) {
            RunConfig cfg = base;
            cfg.algorithm = a;
            cfg.x0 = policy == StartPolicy::zero ? Start::zero : accelerated_start(a);
            CompareRow row;
            row.run = run(m, cfg, false);
            out.rows.push_back(std::move(row));
        }
    }
    for (auto& a : out.rows) {
        if (!a.run.report.ok()) {
            a.max_pairwise_diff = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        a.max_pairwise_diff = 0.0;
        for (const auto& b : out.rows) {
            if (&a == &b || !b.run.report.ok()) continue;
            a.max_pairwise_diff = std::max(a.max_pairwise_diff, matcore::inf_norm(a.run.report.G - b.run.report.G));
        }
        out.max_pairwise_diff = std::max(out.max_pairwise_diff, a.max_pairwise_diff);
    }
    return out;
}

std::string compare_csv(const CompareResult& c) {
    std::ostringstream os;
    os << "algorithm,x0,iterations,cpu_s,residual_inf,max_pairwise_diff\n";
    for (const auto& row : c.rows) {
        const auto& r = row.run;
        os << to_string(r.algorithm) << ',' << to_string(r.x0) << ',' << r.report.iterations << ',' << fmt(r.cpu_s())
           << ',' << fmt(r.report.residual) << ',' << fmt(row.max_pairwise_diff) << '\n';
    }
    return os.str();
}

std::vector<TauRow> tau_sweep(const MmLevyModel& m, const std::vector<double>& taus, const RunConfig& base) {
    const double limit = tau_admissible_limit(m);
    std::vector<TauRow> rows;
    for (double t : taus) {
        TauRow row;
        row.tau = t;
        row.admissible = t > 0.0 && t < limit;
        if (row.admissible) {
            RunConfig cfg = base;
            cfg.algorithm = Algorithm::qme;
            cfg.tau = t;
            cfg.x0 = Start::zero;
            const auto r = run(m, cfg, false);
            row.residual = r.report.residual;
            row.iterations = r.report.iterations;
            row.status = r.report.status;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string tau_sweep_csv(const std::vector<TauRow>& rows) {
    std::ostringstream os;
    os << "tau,residual_inf,iterations\n";
    for (const auto& r : rows) {
        if (r.admissible) {
            os << fmt(r.tau) << ',' << fmt(r.residual) << ',' << r.iterations << '\n';
        } else {
            os << fmt(r.tau) << ",inadmissible,0\n";
        }
    }
    return os.str();
}

std::vector<ScalingRow> scaling(const std::vector<int>& ns, const Example1Params& base_params, const RunConfig& base,
                                int repeats) {
    std::vector<ScalingRow> rows;
    for (int n : ns) {
        Example1Params p = base_params;
        p.n = n;
        const auto m = preset_example1(p);
        for (auto a : {Algorithm::qme, Algorithm::simon}) {
            RunConfig cfg = base;
            cfg.algorithm = a;
            cfg.x0 = Start::zero;
            ScalingRow row;
            row.n = n;
            row.alg = a;
            row.cpu_s = std::numeric_limits<double>::infinity();
            for (int k = 0; k < std::max(1, repeats); ++k) {
                const auto r = run(m, cfg, false);
                row.cpu_s = std::min(row.cpu_s, r.cpu_s());
                row.residual = r.report.residual;
                row.status = r.report.status;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
    std::ostringstream os;
    os << "n,alg,cpu_s,residual_inf\n";
    for (const auto& r : rows) os << r.n << ',' << to_string(r.alg) << ',' << fmt(r.cpu_s) << ',' << fmt(r.residual) << '\n';
    return os.str();
}

}  // namespace mmlevy::exp
