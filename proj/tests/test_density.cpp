#include <doctest.h>

#include <random>

#include "mmlevy/density.hpp"
#include "mmlevy/model.hpp"
#include "oracles.hpp"

using namespace mmlevy;

namespace {

// Moments by brute-force quadrature on [0, hi].
double integral(const std::function<double(double)>& f, double hi) { return oracle::composite_gl(f, 0.0, hi, 400); }

JumpDensity random_phase_type(std::mt19937& rng, int l) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vector init = Vector::NullaryExpr(l, [&] { return u(rng); });
    init /= init.sum();
    const Matrix gen = oracle::random_subgenerator(rng, l, 1.0, 1.0) - 0.2 * Matrix::Identity(l, l);
    return JumpDensity::phase_type(init, gen, u(rng) * 3.0);
}

}  // namespace

TEST_CASE("none density is identically zero") {
    const auto d = JumpDensity::none();
    CHECK(d.is_none());
    CHECK(d.kind() == DensityKind::none);
    CHECK(d.pdf(1.0) == 0.0);
    CHECK(d.mass() == 0.0);
    CHECK(d.mean() == 0.0);
    CHECK(d.tail_mass(0.0) == 0.0);
    CHECK(d.tail_integral(0.0) == 0.0);
    CHECK(d.decay_rate() == 0.0);
}

TEST_CASE("exponential density moments") {
    const auto d = JumpDensity::exponential(2.5, 0.4);
    CHECK(d.kind() == DensityKind::exponential);
    CHECK(d.pdf(0.0) == doctest::Approx(1.0));
    CHECK(d.mass() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(d.mean() == doctest::Approx(0.4 / 2.5).epsilon(1e-15));
    CHECK(d.tail_mass(1.0) == doctest::Approx(0.4 * std::exp(-2.5)).epsilon(1e-14));
    CHECK(d.tail_integral(1.0) == doctest::Approx(0.4 * std::exp(-2.5) / 2.5).epsilon(1e-14));
    CHECK(d.decay_rate() == 2.5);
}

TEST_CASE("phase-type moments against quadrature") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 25; ++trial) {
        const auto d = random_phase_type(rng, 1 + trial % 4);
        const double hi = 60.0 / d.decay_rate();
        const double tol = 1e-10 * std::max(1.0, d.mass());
        CHECK(d.mass() == doctest::Approx(integral([&](double x) { return d.pdf(x); }, hi)).epsilon(tol));
        CHECK(d.mean() == doctest::Approx(integral([&](double x) { return x * d.pdf(x); }, hi)).epsilon(tol));
        for (double x : {0.0, 0.3, 2.0}) {
            CHECK(d.tail_mass(x) ==
                  doctest::Approx(oracle::composite_gl([&](double s) { return d.pdf(s); }, x, x + hi, 400)).epsilon(tol));
            CHECK(d.tail_integral(x) ==
                  doctest::Approx(oracle::composite_gl([&](double s) { return d.tail_mass(s); }, x, x + hi, 400))
                      .epsilon(tol));
        }
        CHECK(d.tail_mass(0.0) == doctest::Approx(d.mass()).epsilon(1e-13));
        CHECK(d.tail_integral(0.0) == doctest::Approx(d.mean()).epsilon(1e-13));
    }
}

TEST_CASE("single-phase phase-type equals the exponential") {
    const auto ph = JumpDensity::phase_type(Vector::Ones(1), Matrix::Constant(1, 1, -1.7), 0.6);
    const auto ex = JumpDensity::exponential(1.7, 0.6);
    for (double x : {0.0, 0.5, 3.0}) {
        CHECK(ph.pdf(x) == doctest::Approx(ex.pdf(x)).epsilon(1e-14));
        CHECK(ph.tail_mass(x) == doctest::Approx(ex.tail_mass(x)).epsilon(1e-14));
        CHECK(ph.tail_integral(x) == doctest::Approx(ex.tail_integral(x)).epsilon(1e-14));
    }
    CHECK(ph.mean() == doctest::Approx(ex.mean()).epsilon(1e-14));
    CHECK(ph.decay_rate() == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_FALSE(ph == ex);
}

TEST_CASE("example 1 jump law is a probability law with unit mean") {
    const auto [init, gen] = example1_phase_type(10, 2.0, 1.0, 1.5);
    const auto d = JumpDensity::phase_type(init, gen);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.mean() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.decay_rate() > 0.0);
    // the slowest phase dominates far out: the tail is much heavier than an
    // exponential with the same mean
    CHECK(d.tail_mass(10.0) > std::exp(-10.0));
}

TEST_CASE("density constructors reject bad parameters") {
    CHECK_THROWS_AS(JumpDensity::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::exponential(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::exponential(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::exponential(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::phase_type(Vector::Ones(2), Matrix::Identity(3, 3) * -1.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::phase_type(Vector::Constant(2, 0.7), -Matrix::Identity(2, 2)), std::invalid_argument);
    Matrix bad(2, 2);
    bad << -1.0, -0.5, 0.5, -1.0;
    CHECK_THROWS_AS(JumpDensity::phase_type(Vector::Constant(2, 0.5), bad), std::invalid_argument);
    Matrix singular(2, 2);
    singular << -1.0, 1.0, 1.0, -1.0;
    CHECK_THROWS_AS(JumpDensity::phase_type(Vector::Constant(2, 0.5), singular), std::invalid_argument);
}

TEST_CASE("density equality") {
    CHECK(JumpDensity::exponential(1.0, 2.0) == JumpDensity::exponential(1.0, 2.0));
    CHECK_FALSE(JumpDensity::exponential(1.0, 2.0) == JumpDensity::exponential(1.0, 2.5));
    CHECK(JumpDensity::none() == JumpDensity{});
    const auto [init, gen] = example1_phase_type(4, 2.0, 1.0, 1.5);
    CHECK(JumpDensity::phase_type(init, gen) == JumpDensity::phase_type(init, gen));
    CHECK(to_string(DensityKind::phase_type) == "phase_type");
}
