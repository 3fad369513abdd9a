#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "mmlevy/matcore.hpp"
#include "mmlevy/model.hpp"
#include "mmlevy/quad.hpp"
#include "mmlevy/rsolve.hpp"
#include "oracles.hpp"

using namespace mmlevy;
using namespace mmlevy::matcore;

TEST_CASE("expm of zero is the identity") {
    for (int n : {1, 3, 7}) CHECK(oracle::max_abs(expm(Matrix::Zero(n, n)) - Matrix::Identity(n, n)) == 0.0);
}

TEST_CASE("expm agrees with an independent Pade implementation") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 6;
        const double scale = std::pow(10.0, (trial % 5) - 2);
        const Matrix a = scale * Matrix::NullaryExpr(n, n, [&] { return g(rng); });
        const Matrix ref = a.exp();
        CHECK(oracle::max_abs(expm(a) - ref) <= 1e-12 * std::max(1.0, oracle::max_abs(ref)));
    }
}

TEST_CASE("expm of a generator is stochastic") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 7;
        const Matrix q = oracle::random_generator(rng, n, 3.0);
        for (double x : {0.01, 0.5, 3.0, 40.0}) {
            const Matrix p = expm(q * x);
            CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
            CHECK(p.minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("expm difference identity against Gauss-Legendre quadrature") {
    // e^{(A+E)t} - e^{At} = int_0^t e^{A(t-s)} E e^{(A+E)s} ds
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const Matrix a = oracle::random_subgenerator(rng, n);
        const Matrix ae = oracle::random_subgenerator(rng, n);
        const Matrix e = ae - a;
        const double t = 0.5 + trial % 4;
        const Matrix lhs = expm(ae * t) - expm(a * t);
        const Matrix rhs = oracle::composite_gl(
            [&](double s) -> Matrix { return expm(a * (t - s)) * e * expm(ae * s); }, 0.0, t, 8);
        CHECK(oracle::max_abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("expm rejects bad input") {
    CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(expm(Matrix::Constant(2, 2, 1e6)), NumericalError);
}

TEST_CASE("spectral radius") {
    CHECK(spectral_radius(Matrix::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-14));
    Vector d(2);
    d << -3.0, 2.0;
    CHECK(spectral_radius(diag(d)) == doctest::Approx(3.0).epsilon(1e-14));
    Matrix rot(2, 2);
    rot << 0.0, -2.0, 2.0, 0.0;  // eigenvalues +-2i
    CHECK(spectral_radius(rot) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spectral_abscissa(rot) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(spectral_radius(Matrix::Zero(2, 3)));

    std::mt19937 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 9;
        const Matrix a = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
        CHECK(spectral_radius(a) <= inf_norm(a) * (1.0 + 1e-12));
    }
}

TEST_CASE("diagonal Sylvester solve") {
    SUBCASE("unit coefficients") {
        const Vector one = Vector::Ones(3);
        CHECK(oracle::max_abs(diag_sylvester_solve(one, one, 2.0 * Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) ==
              0.0);
    }
    SUBCASE("residual of the defining equation") {
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> u(0.1, 3.0);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 2 + trial % 6;
            const Vector c = Vector::NullaryExpr(n, [&] { return u(rng); });
            const Vector b = Vector::NullaryExpr(n, [&] { return u(rng); });
            const Matrix rhs = Matrix::NullaryExpr(n, n, [&] { return u(rng); });
            const Matrix x = diag_sylvester_solve(c, b, rhs);
            const Matrix back = c.asDiagonal() * x + x * b.asDiagonal();
            CHECK(oracle::max_abs(back - rhs) <= 1e-13 * oracle::max_abs(rhs));
        }
    }
    SUBCASE("singular operator") {
        Vector c(2), b(2);
        c << 1.0, 2.0;
        b << -2.0, 3.0;
        CHECK_THROWS_AS(diag_sylvester_solve(c, b, Matrix::Ones(2, 2)), NumericalError);
    }
    SUBCASE("first inner NARE iterate on example 2 matches a dense Kronecker solve") {
        const auto m = preset_example2();
        const auto r = phase_rates(m);
        const Matrix s0 = Matrix::Zero(3, 3);
        const Matrix rhs = s0 * s0 + 2.0 * m.sigma2.cwiseInverse().asDiagonal() * quad::c_hat(m, s0, r.b);
        const Matrix x = diag_sylvester_solve(r.c, r.b, rhs);
        CHECK(oracle::max_abs(x - oracle::kron_sylvester(r.c, r.b, rhs)) <= 1e-14);
    }
}

TEST_CASE("left diagonal Sylvester solve matches the Kronecker system") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const Vector c = Vector::NullaryExpr(n, [&] { return u(rng); });
        const Matrix a = oracle::random_subgenerator(rng, n);
        const Matrix rhs = Matrix::NullaryExpr(n, n, [&] { return u(rng); });
        const Matrix x = left_diag_sylvester_solve(c, a, rhs);
        CHECK(oracle::max_abs(x - oracle::kron_left_diag_sylvester(c, a, rhs)) <= 1e-12 * oracle::max_abs(x));
    }
}

TEST_CASE("structure checks") {
    const auto ex2 = preset_example2();
    SUBCASE("example 2 generator") {
        const auto rep = structure_check(ex2.Q);
        CHECK(rep.is_generator);
        CHECK(rep.is_subgenerator);
        CHECK(rep.is_irreducible);
        CHECK_FALSE(rep.is_nonnegative);
    }
    SUBCASE("minus an irreducible generator is a singular M-matrix") {
        const auto rep = structure_check(-ex2.Q);
        CHECK(rep.is_z_matrix);
        CHECK(rep.is_m_matrix);
        CHECK(std::abs(eigenvalues(-ex2.Q).real().minCoeff()) <= 1e-12);
    }
    SUBCASE("reducible pattern") {
        Matrix q(3, 3);
        q << -1, 1, 0, 0, -1, 1, 0, 0, 0;
        CHECK_FALSE(is_irreducible(q));
        CHECK(structure_check(q).is_generator);
    }
    SUBCASE("stochastic flags") {
        Matrix p(2, 2);
        p << 0.3, 0.7, 0.5, 0.4;
        const auto rep = structure_check(p);
        CHECK(rep.is_nonnegative);
        CHECK(rep.is_substochastic_rows);
        CHECK_FALSE(rep.is_stochastic_rows);
    }
    SUBCASE("implications on random matrices") {
        std::mt19937 rng(21);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 2 + trial % 5;
            Matrix a;
            switch (trial % 4) {
                case 0: a = oracle::random_generator(rng, n); break;
                case 1: a = oracle::random_subgenerator(rng, n); break;
                case 2: a = -oracle::random_subgenerator(rng, n); break;
                default: a = Matrix::NullaryExpr(n, n, [&] { return u(rng); }); break;
            }
            const auto rep = structure_check(a);
            if (rep.is_stochastic_rows) CHECK(rep.is_substochastic_rows);
            if (rep.is_generator) CHECK(rep.is_subgenerator);
            if (rep.is_m_matrix) CHECK(rep.is_z_matrix);
            if (trial % 4 == 0) CHECK(rep.is_generator);
            if (trial % 4 == 2) CHECK(rep.is_m_matrix);
        }
    }
    CHECK_THROWS(structure_check(Matrix::Zero(2, 3)));
}

TEST_CASE("solve refuses singular systems") {
    CHECK_THROWS_AS(solve(Matrix::Zero(2, 2), Matrix::Identity(2, 2), "test"), NumericalError);
    Matrix a(2, 2);
    a << 2, 1, 1, 3;
    CHECK(oracle::max_abs(a * solve(a, Matrix::Identity(2, 2), "test") - Matrix::Identity(2, 2)) <= 1e-15);
}
