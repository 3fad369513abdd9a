// mmlevy: solve F(G) = 0 for Markov-modulated Levy models and run the
// convergence / residual / scaling experiments.
//
// Exit codes: 0 ok, 1 bad input or model, 2 solver did not converge,
// 3 compare found disagreeing solutions.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmlevy/experiments.hpp"
#include "mmlevy/model_io.hpp"
#include "mmlevy/qsolve.hpp"

using namespace mmlevy;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitDisagreement = 3;
constexpr double kAgreementTol = 1e-8;

struct ModelArgs {
    std::string source = "preset:example1";
    std::vector<std::string> set;

    void attach(CLI::App* app) {
        app->add_option("--model", source, "preset:example1 | preset:example2 | file:<path>")
            ->capture_default_str();
        app->add_option_function<std::string>(
            "--preset", [this](const std::string& p) { source = "preset:" + p; }, "shorthand for --model preset:<name>");
        app->add_option("--set", set,
                        "preset parameter key=value; example1: n ell r1 r2 c lambda alpha rho, "
                        "example2: alpha omega beta gamma eta");
    }

    exp::ModelSource resolve() const {
        auto src = exp::parse_source(source);
        for (const auto& kv : set) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            const auto key = kv.substr(0, eq);
            const double v = std::stod(kv.substr(eq + 1));
            bool known = false;
            if (src.kind == exp::ModelSource::Kind::example1) {
                auto& p = src.ex1;
                const std::map<std::string, double*> reals{{"r1", &p.r1},         {"r2", &p.r2},
                                                           {"c", &p.c},           {"lambda", &p.lambda},
                                                           {"alpha", &p.alpha},   {"rho", &p.rho}};
                if (key == "n") p.n = static_cast<int>(v), known = true;
                if (key == "ell") p.ell = static_cast<int>(v), known = true;
                if (auto it = reals.find(key); it != reals.end()) *it->second = v, known = true;
            } else if (src.kind == exp::ModelSource::Kind::example2) {
                auto& p = src.ex2;
                const std::map<std::string, double*> reals{
                    {"alpha", &p.alpha}, {"omega", &p.omega}, {"beta", &p.beta}, {"gamma", &p.gamma}, {"eta", &p.eta}};
                if (auto it = reals.find(key); it != reals.end()) *it->second = v, known = true;
            }
            if (!known) throw std::invalid_argument("parameter '" + key + "' does not apply to this model source");
        }
        return src;
    }
};

struct SolverArgs {
    std::string tau = "auto";
    double eps = 1e-14;
    int max_iter = 200;
    int inner_max_iter = 100;
    std::string inner = "sda";
    std::string quad = "closed_form";
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double truncation_tail = 1e-16;

    void attach(CLI::App* app) {
        app->add_option("--tau", tau, "step parameter, or 'auto' for 0.999999 tau*(mean)")->capture_default_str();
        app->add_option("--eps", eps, "stopping tolerance on ||X_{k+1} - X_k||_inf")->capture_default_str();
        app->add_option("--max-iter", max_iter, "outer iteration cap")->capture_default_str();
        app->add_option("--inner-max-iter", inner_max_iter, "cyclic reduction / doubling cap")->capture_default_str();
        app->add_option("--inner", inner, "NARE inner solver")
            ->check(CLI::IsMember({"sda", "sylvester_fp"}))
            ->capture_default_str();
        app->add_option("--quad", quad, "jump transform evaluation")
            ->check(CLI::IsMember({"closed_form", "adaptive"}))
            ->capture_default_str();
        app->add_option("--rel-tol", rel_tol, "adaptive quadrature relative tolerance")->capture_default_str();
        app->add_option("--abs-tol", abs_tol, "adaptive quadrature absolute tolerance")->capture_default_str();
        app->add_option("--truncation-tail", truncation_tail, "neglected tail mass of the truncated integrals")
            ->capture_default_str();
    }

    exp::RunConfig config() const {
        exp::RunConfig cfg;
        if (tau != "auto") cfg.tau = std::stod(tau);
        cfg.opts.eps = eps;
        cfg.opts.max_iter = max_iter;
        cfg.opts.inner_max_iter = inner_max_iter;
        cfg.opts.inner = inner == "sda" ? InnerMethod::sda : InnerMethod::sylvester_fp;
        cfg.opts.quad.method = quad == "adaptive" ? QuadMethod::adaptive : QuadMethod::closed_form;
        cfg.opts.quad.rel_tol = rel_tol;
        cfg.opts.quad.abs_tol = abs_tol;
        cfg.opts.quad.truncation_tail = truncation_tail;
        return cfg;
    }
};

MmLevyModel load_valid(const ModelArgs& args) {
    auto m = exp::load_source(args.resolve());
    require_valid(m);
    return m;
}

std::vector<double> parse_taus(const std::string& list, const MmLevyModel& m) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(item == "auto" ? tau_auto(m) : std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("--taus is empty");
    return out;
}

void emit(const std::string& prefix, const std::string& suffix, const std::string& body) {
    if (prefix.empty()) return;
    write_file_atomic(prefix + suffix, body);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-passage matrix solver for Markov-modulated Levy processes"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run one algorithm and write trace / summary files");
    ModelArgs solve_model;
    SolverArgs solve_args;
    std::string algorithm = "qme";
    std::string x0 = "zero";
    std::string output = "mmlevy_run";
    std::vector<std::string> emit_kinds{"csv", "json"};
    solve_model.attach(solve);
    solve_args.attach(solve);
    solve->add_option("--algorithm", algorithm, "fi | ubased | qme | nare | simon | breuer")->capture_default_str();
    solve->add_option("--x0", x0, "zero | identity (fi, ubased, qme) | delta_b (nare, simon)")->capture_default_str();
    solve->add_option("--output", output, "output path prefix")->capture_default_str();
    solve->add_option("--emit", emit_kinds, "files to write")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // compare
    auto* cmp = app.add_subcommand("compare", "run several algorithms and compare their solutions");
    ModelArgs cmp_model;
    SolverArgs cmp_args;
    std::vector<std::string> cmp_algs{"fi", "ubased", "qme", "nare", "simon", "breuer"};
    std::string cmp_x0 = "zero";
    std::string cmp_output;
    cmp_model.attach(cmp);
    cmp_args.attach(cmp);
    cmp->add_option("--algorithms", cmp_algs, "comma separated list")->delimiter(',')->capture_default_str();
    cmp->add_option("--x0", cmp_x0, "zero | accelerated | both")
        ->check(CLI::IsMember({"zero", "accelerated", "both"}))
        ->capture_default_str();
    cmp->add_option("--output", cmp_output, "write <prefix>.compare.csv");

    // tau-sweep
    auto* sweep = app.add_subcommand("tau-sweep", "QME-based residual as a function of tau");
    ModelArgs sweep_model;
    SolverArgs sweep_args;
    std::string taus = "auto,1e-1,1e-3,1e-5";
    std::string sweep_output;
    sweep_model.attach(sweep);
    sweep_args.attach(sweep);
    sweep->add_option("--taus", taus, "comma separated values; 'auto' allowed")->capture_default_str();
    sweep->add_option("--output", sweep_output, "write <prefix>.tau_sweep.csv");

    // scaling
    auto* scale = app.add_subcommand("scaling", "QME-based vs Simon on example1 for growing n");
    ModelArgs scale_model;
    SolverArgs scale_args;
    std::vector<int> ns{10, 20, 40};
    int repeat = 3;
    std::string scale_output;
    scale_model.attach(scale);
    scale_args.attach(scale);
    scale->add_option("--ns", ns, "phase counts")->delimiter(',')->capture_default_str();
    scale->add_option("--repeat", repeat, "timing repeats (best is kept)")->capture_default_str();
    scale->add_option("--output", scale_output, "write <prefix>.scaling.csv");

    // export / validate
    auto* exportc = app.add_subcommand("export", "write a model as JSON");
    ModelArgs export_model;
    std::string export_path;
    export_model.attach(exportc);
    exportc->add_option("--to", export_path, "destination file")->required();

    auto* check = app.add_subcommand("validate", "check every model invariant");
    ModelArgs check_model;
    check_model.attach(check);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto m = load_valid(solve_model);
            auto cfg = solve_args.config();
            cfg.algorithm = exp::parse_algorithm(algorithm);
            cfg.x0 = exp::parse_start(x0);
            const auto r = exp::run(m, cfg);
            for (const auto& kind : emit_kinds) {
                if (kind == "csv") emit(output, ".trace.csv", exp::trace_csv(r));
                if (kind == "json") emit(output, ".summary.json", exp::summary_json(r));
            }
            std::cout << exp::to_string(r.algorithm) << " status=" << to_string(r.report.status)
                      << " iterations=" << r.report.iterations << " residual_inf=" << exp::fmt(r.report.residual)
                      << " tau=" << exp::fmt(r.tau) << " kappa=" << exp::fmt(r.drift.kappa);
            if (r.rates) std::cout << " rho_R=" << exp::fmt(r.rates->rho_R) << " rho_Rhat=" << exp::fmt(r.rates->rho_Rhat);
            if (r.observed_rate) std::cout << " observed_rate=" << exp::fmt(*r.observed_rate);
            std::cout << '\n';
            if (!r.report.message.empty()) std::cerr << "note: " << r.report.message << '\n';
            if (r.report.status == SolveStatus::invalid_input) return kExitBadInput;
            return r.report.ok() ? 0 : kExitNoConvergence;
        }
        if (*cmp) {
            const auto m = load_valid(cmp_model);
            std::vector<exp::Algorithm> algs;
            for (const auto& a : cmp_algs) algs.push_back(exp::parse_algorithm(a));
            std::vector<exp::StartPolicy> policies;
            if (cmp_x0 != "accelerated") policies.push_back(exp::StartPolicy::zero);
            if (cmp_x0 != "zero") policies.push_back(exp::StartPolicy::accelerated);
            const auto res = exp::compare(m, algs, policies, cmp_args.config());
            const auto csv = exp::compare_csv(res);
            std::cout << csv;
            emit(cmp_output, ".compare.csv", csv);
            int failed = 0;
            for (const auto& row : res.rows) {
                if (!row.run.report.ok()) {
                    ++failed;
                    std::cerr << "failed: " << exp::to_string(row.run.algorithm) << " ("
                              << to_string(row.run.report.status) << ") " << row.run.report.message << '\n';
                }
            }
            if (res.max_pairwise_diff > kAgreementTol) {
                std::cerr << "disagreement: max pairwise difference " << exp::fmt(res.max_pairwise_diff) << '\n';
                return kExitDisagreement;
            }
            return failed ? kExitNoConvergence : 0;
        }
        if (*sweep) {
            const auto m = load_valid(sweep_model);
            const auto rows = exp::tau_sweep(m, parse_taus(taus, m), sweep_args.config());
            const auto csv = exp::tau_sweep_csv(rows);
            std::cout << csv;
            emit(sweep_output, ".tau_sweep.csv", csv);
            return 0;
        }
        if (*scale) {
            const auto src = scale_model.resolve();
            if (src.kind != exp::ModelSource::Kind::example1) {
                throw std::invalid_argument("scaling runs on preset:example1 only");
            }
            const auto rows = exp::scaling(ns, src.ex1, scale_args.config(), repeat);
            const auto csv = exp::scaling_csv(rows);
            std::cout << csv;
            emit(scale_output, ".scaling.csv", csv);
            return 0;
        }
        if (*exportc) {
            save_model(export_path, exp::load_source(export_model.resolve()));
            return 0;
        }
        if (*check) {
            const auto m = exp::load_source(check_model.resolve());
            const auto v = validate(m);
            for (const auto& e : v) std::cout << "[" << e.code << "] " << e.message << '\n';
            if (v.empty()) std::cout << "valid\n";
            return v.empty() ? 0 : kExitBadInput;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    return 0;
}
