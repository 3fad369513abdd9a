#include <doctest.h>

#include <random>

#include "mmlevy/qsolve.hpp"
#include "oracles.hpp"

using namespace mmlevy;

namespace {

// Smaller root of b V^2 - V + a = 0.
double scalar_minimal(double a, double b) { return (1.0 - std::sqrt(1.0 - 4.0 * a * b)) / (2.0 * b); }

Matrix substochastic(std::mt19937& rng, int n) { return oracle::random_rows(rng, Vector::Ones(n)); }

SolveOptions slow_opts() {
    SolveOptions o;
    o.max_iter = 20000;
    return o;
}

}  // namespace

TEST_CASE("tau bounds on example 1") {
    const auto m = preset_example1();
    // per phase: 2(q - rho) t^2 - 2 a t + sigma^2 = 0 and 2 q t^2 - (2a + mean) t + sigma^2 = 0
    // with q = -1, rho = mean = 0.1, a = -1, sigma^2 = 1
    const double basic = (2.0 + std::sqrt(4.0 + 8.8)) / 4.4;
    const double mean = (1.9 + std::sqrt(1.9 * 1.9 + 8.0)) / 4.0;
    CHECK(tau_star(m, TauBound::basic) == doctest::Approx(basic).epsilon(1e-14));
    CHECK(tau_star(m, TauBound::mean) == doctest::Approx(mean).epsilon(1e-14));
    CHECK(tau_admissible_limit(m) == doctest::Approx(mean).epsilon(1e-14));
    CHECK(tau_auto(m) == doctest::Approx(kTauSafety * mean).epsilon(1e-15));
}

TEST_CASE("tau bound caps the positive-drift phases") {
    // example 2 phase 2 has a = 1 > 0, so sigma^2 / a = 1 also limits tau
    const auto m = preset_example2();
    CHECK(tau_star(m, TauBound::basic) <= 1.0);
    CHECK(tau_star(m, TauBound::mean) <= 1.0);
    CHECK_NOTHROW(QmeSystem(m, 0.999 * tau_admissible_limit(m)));
}

TEST_CASE("admissible tau keeps the constant coefficient nonnegative") {
    std::mt19937 rng(31);
    for (const auto& m : {preset_example1(), preset_example2()}) {
        for (auto bound : {TauBound::basic, TauBound::mean}) {
            const double tau = 0.999 * tau_star(m, bound);
            const QmeSystem sys(m, tau);
            CHECK(sys.B0().diagonal().maxCoeff() < 0.0);
            CHECK(sys.Bt1().minCoeff() >= 0.0);
            for (int trial = 0; trial < 50; ++trial) {
                const Matrix w = substochastic(rng, static_cast<int>(m.n()));
                CHECK(sys.Bm1(w).minCoeff() >= -1e-12);
                CHECK(sys.Btm1(w).minCoeff() >= -1e-12);
            }
        }
    }
}

TEST_CASE("coefficient map is monotone in W") {
    std::mt19937 rng(32);
    for (const auto& m : {preset_example1(), preset_example2()}) {
        const QmeSystem sys(m, tau_auto(m));
        for (int trial = 0; trial < 30; ++trial) {
            const int n = static_cast<int>(m.n());
            const Matrix hi = substochastic(rng, n);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const Matrix lo = hi.cwiseProduct(Matrix::NullaryExpr(n, n, [&] { return u(rng); }));
            CHECK((sys.Btm1(hi) - sys.Btm1(lo)).minCoeff() >= -1e-13);
        }
    }
}

TEST_CASE("W and G conversions") {
    const auto m = preset_example2();
    const QmeSystem sys(m, 0.3);
    const Matrix g = -Matrix::Identity(3, 3) + 0.2 * Matrix::Ones(3, 3);
    CHECK(oracle::max_abs(sys.g_from_w(sys.w_from_g(g)) - g) <= 1e-15);
    CHECK_THROWS_AS(QmeSystem(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QmeSystem(m, 5.0), std::invalid_argument);
}

TEST_CASE("cyclic reduction finds the minimal solution") {
    SUBCASE("scalar with two real roots") {
        const double a = 0.2, b = 0.7;
        CrStats st;
        const Matrix v = cr_solve(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), 1e-15, 100, &st);
        CHECK(v(0, 0) == doctest::Approx(scalar_minimal(a, b)).epsilon(1e-14));
        CHECK_FALSE(st.fell_back);
        CHECK(st.iterations < 20);
    }
    SUBCASE("near-critical scalar case picks the lower of two close roots") {
        // roots 0.49 and 0.51; the exactly critical case needs a shifted reduction
        const Matrix v = cr_solve(Matrix::Constant(1, 1, 0.2499), Matrix::Ones(1, 1), 1e-15, 100);
        CHECK(v(0, 0) == doctest::Approx(0.49).epsilon(1e-13));
    }
    SUBCASE("random matrices against plain fixed point from zero") {
        std::mt19937 rng(33);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + trial % 5;
            // B~_1 1 + B~_{-1} 1 <= 1 keeps the minimal solution substochastic
            const Matrix bt1 = 0.5 * oracle::random_rows(rng, Vector::Ones(n));
            const Matrix bm1 = 0.45 * oracle::random_rows(rng, Vector::Ones(n));
            const Matrix v = cr_solve(bm1, bt1, 1e-15, 100);
            Matrix fp = Matrix::Zero(n, n);
            for (int k = 0; k < 5000; ++k) fp = bm1 + bt1 * (fp * fp);
            CHECK(oracle::max_abs(v - fp) <= 1e-12);
            CHECK(oracle::max_abs(bm1 + bt1 * (v * v) - v) <= 1e-13);
            CHECK(v.minCoeff() >= -1e-15);
        }
    }
    CHECK_THROWS_AS(cr_solve(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("two-phase Brownian model against the companion-pencil solvent") {
    Matrix q(2, 2);
    q << -1.0, 1.0, 2.0, -2.0;
    Vector a(2), s2(2);
    a << -1.0, 0.5;
    s2 << 1.0, 2.0;
    const auto m = oracle::no_jump_model(a, s2, q);
    // D_a G + 1/2 D_sigma2 G^2 + Q = 0 as a quadratic pencil
    const Matrix want = oracle::quadratic_solvent(0.5 * matcore::diag(s2), matcore::diag(a), q);
    const double tau = tau_auto(m);
    for (const auto& rep : {qme_outer_solve(m, tau, Matrix::Zero(2, 2)), u_based_solve(m, tau, Matrix::Zero(2, 2), slow_opts()),
                            fi_solve(m, tau, Matrix::Zero(2, 2), slow_opts())}) {
        CAPTURE(rep.algorithm);
        REQUIRE(rep.ok());
        CHECK(oracle::max_abs(rep.G - want) <= 1e-10);
        CHECK(rep.residual <= 1e-12);
    }
}

TEST_CASE("W iterations are monotone from zero") {
    for (const auto& m : {preset_example1(), preset_example2()}) {
        const auto n = m.n();
        SolveOptions o = slow_opts();
        o.keep_iterates = true;
        o.max_iter = 400;
        const double tau = tau_auto(m);
        for (const auto& rep : {fi_solve(m, tau, Matrix::Zero(n, n), o), u_based_solve(m, tau, Matrix::Zero(n, n), o),
                                qme_outer_solve(m, tau, Matrix::Zero(n, n), o)}) {
            CAPTURE(rep.algorithm);
            REQUIRE(rep.iterates.size() >= 2);
            CHECK(rep.iterates.front() == Matrix::Zero(n, n));
            for (std::size_t k = 1; k < rep.iterates.size(); ++k) {
                CHECK((rep.iterates[k] - rep.iterates[k - 1]).minCoeff() >= -1e-12);
                CHECK(rep.iterates[k].rowwise().sum().maxCoeff() <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("solvers agree and the quadratic step is fastest") {
    for (const auto& m : {preset_example1(), preset_example2()}) {
        const auto n = m.n();
        const double tau = tau_auto(m);
        const auto o = slow_opts();
        const auto fi = fi_solve(m, tau, Matrix::Zero(n, n), o);
        const auto ub = u_based_solve(m, tau, Matrix::Zero(n, n), o);
        const auto qm = qme_outer_solve(m, tau, Matrix::Zero(n, n), o);
        REQUIRE(fi.ok());
        REQUIRE(ub.ok());
        REQUIRE(qm.ok());
        CHECK(matcore::inf_norm(fi.G - qm.G) <= 1e-10);
        CHECK(matcore::inf_norm(ub.G - qm.G) <= 1e-10);
        CHECK(qm.iterations < ub.iterations);
        CHECK(ub.iterations < fi.iterations);
        CHECK(qm.residual <= 1e-12);
        // negative drift: G is a generator
        CHECK(qm.G.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(qm.error_trace.size() == static_cast<std::size_t>(qm.iterations));
        CHECK(qm.elapsed_trace.size() == qm.error_trace.size());
        // starting from I is faster than from zero
        CHECK(qme_outer_solve(m, tau, Matrix::Identity(n, n), o).iterations < qm.iterations);
    }
}

TEST_CASE("invalid input is reported, not thrown") {
    const auto m = preset_example1();
    const auto n = m.n();
    const double limit = tau_admissible_limit(m);
    for (double tau : {0.0, -1.0, limit, 2.0 * limit}) {
        const auto r = qme_outer_solve(m, tau, Matrix::Zero(n, n));
        CHECK(r.status == SolveStatus::invalid_input);
        CHECK_FALSE(r.message.empty());
        CHECK(std::isinf(r.residual));
    }
    CHECK(fi_solve(m, 1.0, Matrix::Zero(2, 2)).status == SolveStatus::invalid_input);
    auto broken = m;
    broken.sigma2(0) = 0.0;
    CHECK(u_based_solve(broken, 1.0, Matrix::Zero(n, n)).status == SolveStatus::invalid_input);
}

TEST_CASE("iteration budget") {
    const auto m = preset_example2();
    SolveOptions o;
    o.max_iter = 5;
    const auto r = fi_solve(m, tau_auto(m), Matrix::Zero(3, 3), o);
    CHECK(r.status == SolveStatus::max_iter);
    CHECK(r.iterations == 5);
    CHECK(to_string(r.status) == "max_iter");
}
