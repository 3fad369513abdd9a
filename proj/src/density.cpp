#include "mmlevy/density.hpp"

#include <cmath>
#include <stdexcept>

namespace mmlevy {

std::string to_string(DensityKind k) {
    switch (k) {
        case DensityKind::none: return "none";
        case DensityKind::exponential: return "exponential";
        case DensityKind::phase_type: return "phase_type";
    }
    return "unknown";
}

JumpDensity::JumpDensity(ExponentialJumps v) : rep_(v) {
    if (!(v.rate > 0.0) || !std::isfinite(v.rate)) {
        throw std::invalid_argument("exponential density: rate must be positive and finite");
    }
    if (!(v.weight >= 0.0) || !std::isfinite(v.weight)) {
        throw std::invalid_argument("exponential density: weight must be nonnegative");
    }
}

JumpDensity::JumpDensity(PhaseTypeJumps v) {
    const auto l = v.gen.rows();
    if (l == 0 || v.gen.cols() != l || v.init.size() != l) {
        throw std::invalid_argument("phase-type density: init/gen dimension mismatch");
    }
    if (!(v.weight >= 0.0) || !std::isfinite(v.weight)) {
        throw std::invalid_argument("phase-type density: weight must be nonnegative");
    }
    if ((v.init.array() < 0.0).any() || v.init.sum() > 1.0 + 1e-12) {
        throw std::invalid_argument("phase-type density: init must be a sub-probability vector");
    }
    const auto rep = matcore::structure_check(v.gen, 1e-12);
    if (!rep.is_subgenerator) {
        throw std::invalid_argument("phase-type density: gen must be a subgenerator");
    }
    if (!(matcore::spectral_abscissa(v.gen) < 0.0)) {
        throw std::invalid_argument("phase-type density: gen must be nonsingular");
    }
    rep_ = std::move(v);
}

DensityKind JumpDensity::kind() const {
    return static_cast<DensityKind>(rep_.index());
}

namespace {

Vector exit_vector(const PhaseTypeJumps& p) {
    return -(p.gen * Vector::Ones(p.gen.rows()));
}

}  // namespace

double JumpDensity::pdf(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: {
            const auto& e = as_exponential();
            return e.weight * e.rate * std::exp(-e.rate * x);
        }
        case DensityKind::phase_type: {
            const auto& p = as_phase_type();
            return p.weight * p.init.dot(matcore::expm(p.gen * x) * exit_vector(p));
        }
    }
    return 0.0;
}

double JumpDensity::mass() const {
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: return as_exponential().weight;
        case DensityKind::phase_type: {
            const auto& p = as_phase_type();
            return p.weight * p.init.sum();
        }
    }
    return 0.0;
}

double JumpDensity::mean() const {
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: {
            const auto& e = as_exponential();
            return e.weight / e.rate;
        }
        case DensityKind::phase_type: {
            const auto& p = as_phase_type();
            const Vector ones = Vector::Ones(p.gen.rows());
            return p.weight * p.init.dot(matcore::solve_vec(-p.gen, ones, "phase-type mean"));
        }
    }
    return 0.0;
}

double JumpDensity::tail_mass(double x) const {
    x = std::max(x, 0.0);
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: {
            const auto& e = as_exponential();
            return e.weight * std::exp(-e.rate * x);
        }
        case DensityKind::phase_type: {
            const auto& p = as_phase_type();
            return p.weight * (matcore::expm(p.gen * x).transpose() * p.init).sum();
        }
    }
    return 0.0;
}

double JumpDensity::tail_integral(double x) const {
    x = std::max(x, 0.0);
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: {
            const auto& e = as_exponential();
            return e.weight * std::exp(-e.rate * x) / e.rate;
        }
        case DensityKind::phase_type: {
            const auto& p = as_phase_type();
            const Vector ones = Vector::Ones(p.gen.rows());
            const Vector row = matcore::expm(p.gen * x).transpose() * p.init;
            return p.weight * row.dot(matcore::solve_vec(-p.gen, ones, "phase-type tail"));
        }
    }
    return 0.0;
}

double JumpDensity::decay_rate() const {
    switch (kind()) {
        case DensityKind::none: return 0.0;
        case DensityKind::exponential: return as_exponential().rate;
        case DensityKind::phase_type: return -matcore::spectral_abscissa(as_phase_type().gen);
    }
    return 0.0;
}

}  // namespace mmlevy
