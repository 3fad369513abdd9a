#pragma once

// Jump-size densities on (0, inf): none, weighted exponential and weighted
// phase-type. All three keep mass, mean and matrix Laplace-type transforms
// available in closed form.

#include <string>
#include <variant>

#include "mmlevy/matcore.hpp"

namespace mmlevy {

struct NoJumps {
    bool operator==(const NoJumps&) const = default;
};

/// weight * rate * exp(-rate x)
struct ExponentialJumps {
    double rate = 1.0;
    double weight = 1.0;
    bool operator==(const ExponentialJumps&) const = default;
};

/// weight * init^T exp(gen x) (-gen 1)
struct PhaseTypeJumps {
    Vector init;
    Matrix gen;
    double weight = 1.0;
    bool operator==(const PhaseTypeJumps& o) const {
        return weight == o.weight && init.size() == o.init.size() && gen.rows() == o.gen.rows() &&
               gen.cols() == o.gen.cols() && init == o.init && gen == o.gen;
    }
};

enum class DensityKind { none, exponential, phase_type };

std::string to_string(DensityKind k);

class JumpDensity {
public:
    JumpDensity() = default;
    JumpDensity(NoJumps v) : rep_(v) {}
    JumpDensity(ExponentialJumps v);
    JumpDensity(PhaseTypeJumps v);

    static JumpDensity none() { return JumpDensity{}; }
    static JumpDensity exponential(double rate, double weight = 1.0) {
        return JumpDensity(ExponentialJumps{rate, weight});
    }
    static JumpDensity phase_type(Vector init, Matrix gen, double weight = 1.0) {
        return JumpDensity(PhaseTypeJumps{std::move(init), std::move(gen), weight});
    }

    DensityKind kind() const;
    bool is_none() const { return kind() == DensityKind::none; }

    const ExponentialJumps& as_exponential() const { return std::get<ExponentialJumps>(rep_); }
    const PhaseTypeJumps& as_phase_type() const { return std::get<PhaseTypeJumps>(rep_); }

    double pdf(double x) const;
    /// Integral over (0, inf).
    double mass() const;
    /// Integral of x * pdf(x) over (0, inf).
    double mean() const;
    /// Integral of pdf over (x, inf).
    double tail_mass(double x) const;
    /// Integral of tail_mass over (x, inf).
    double tail_integral(double x) const;
    /// Slowest exponential decay rate of the density (0 for none).
    double decay_rate() const;

    bool operator==(const JumpDensity&) const = default;

private:
    std::variant<NoJumps, ExponentialJumps, PhaseTypeJumps> rep_;
};

}  // namespace mmlevy
