#include "mmlevy/quad.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mmlevy::quad {

namespace {

// Gauss-Kronrod 7/15 abscissae (non-negative half) and weights.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kMaxPanels = 20000;

struct Panel {
    double lo;
    double hi;
    Matrix value;
    double error;
};

Panel eval_panel(const std::function<Matrix(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const Matrix fc = f(center);
    Matrix kronrod = kWgk[7] * fc;
    Matrix gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[static_cast<std::size_t>(j)];
        const Matrix sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[static_cast<std::size_t>(j)] * sum;
        if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * sum;
    }
    kronrod *= half;
    gauss *= half;
    const double err = (kronrod - gauss).cwiseAbs().maxCoeff();
    return Panel{lo, hi, std::move(kronrod), err};
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void check_stable_enough(const JumpDensity& d, const Matrix& y) {
    const double alpha = matcore::spectral_abscissa(y);
    if (!(alpha < d.decay_rate())) {
        throw NumericalError("jump transform diverges: spectral abscissa of the exponent (" +
                             std::to_string(alpha) + ") is not below the density decay rate (" +
                             std::to_string(d.decay_rate()) + ")");
    }
}

// w (init^T (x) I) (-(T (+) Y))^{-1} (v (x) I)
Matrix phase_type_kron(const PhaseTypeJumps& p, const Vector& v, const Matrix& y) {
    const auto l = p.gen.rows();
    const auto n = y.rows();
    Matrix op(l * n, l * n);
    Matrix rhs = Matrix::Zero(l * n, n);
    for (Eigen::Index r = 0; r < l; ++r) {
        for (Eigen::Index c = 0; c < l; ++c) {
            auto block = op.block(r * n, c * n, n, n);
            block.setZero();
            block.diagonal().setConstant(-p.gen(r, c));
            if (r == c) block -= y;
        }
        rhs.block(r * n, 0, n, n).diagonal().setConstant(v(r));
    }
    const Matrix z = matcore::solve(op, rhs, "phase-type transform");
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index r = 0; r < l; ++r) {
        if (p.init(r) != 0.0) out += p.init(r) * z.block(r * n, 0, n, n);
    }
    return p.weight * out;
}

double weight_value(const JumpDensity& d, Weight w, double x) {
    return w == Weight::density ? d.pdf(x) : d.tail_mass(x);
}

double weight_tail(const JumpDensity& d, Weight w, double x) {
    return w == Weight::density ? d.tail_mass(x) : d.tail_integral(x);
}

}  // namespace

Matrix integrate(const std::function<Matrix(double)>& f, double lo, double hi, const QuadSettings& s,
                 const std::vector<double>& breakpoints, AdaptiveStats* stats) {
    if (!(hi > lo)) throw std::invalid_argument("integrate: empty interval");
    std::vector<double> edges{lo};
    for (double b : breakpoints) {
        if (b > edges.back() && b < hi) edges.push_back(b);
    }
    edges.push_back(hi);

    std::vector<Panel> panels;
    panels.reserve(edges.size() * 4);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) panels.push_back(eval_panel(f, edges[k], edges[k + 1]));

    auto total_value = [&] {
        std::vector<std::size_t> order(panels.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return panels[a].lo < panels[b].lo; });
        Matrix sum = Matrix::Zero(panels[0].value.rows(), panels[0].value.cols());
        for (auto k : order) sum += panels[k].value;
        return sum;
    };
    auto total_error = [&] {
        double e = 0.0;
        for (const auto& p : panels) e += p.error;
        return e;
    };

    // Max-heap of splittable panels by error; running totals are refreshed
    // exactly whenever they claim convergence.
    const double min_width = 1e-13 * (hi - lo);
    auto by_error = [&](std::size_t a, std::size_t b) { return panels[a].error < panels[b].error; };
    std::vector<std::size_t> heap;
    auto offer = [&](std::size_t k) {
        if (panels[k].hi - panels[k].lo <= min_width) return;
        heap.push_back(k);
        std::push_heap(heap.begin(), heap.end(), by_error);
    };
    for (std::size_t k = 0; k < panels.size(); ++k) offer(k);
    Matrix value = total_value();
    double err = total_error();
    while (true) {
        if (err <= std::max(s.abs_tol, s.rel_tol * max_abs(value))) {
            value = total_value();
            err = total_error();
            if (err <= std::max(s.abs_tol, s.rel_tol * max_abs(value))) break;
        }
        if (heap.empty()) break;
        if (static_cast<int>(panels.size()) >= kMaxPanels) {
            throw NumericalError("integrate: panel budget exhausted before reaching tolerance");
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const std::size_t worst = heap.back();
        heap.pop_back();
        const Panel old = panels[worst];
        const double mid = 0.5 * (old.lo + old.hi);
        panels[worst] = eval_panel(f, old.lo, mid);
        panels.push_back(eval_panel(f, mid, old.hi));
        value += panels[worst].value + panels.back().value - old.value;
        err += panels[worst].error + panels.back().error - old.error;
        offer(worst);
        offer(panels.size() - 1);
    }

    const Matrix result = total_value();
    if (!result.allFinite()) throw NumericalError("integrate: non-finite result");
    if (stats) {
        stats->panels = static_cast<int>(panels.size());
        stats->error_estimate = total_error();
        stats->upper_limit = hi;
    }
    return result;
}

double truncation_point(const JumpDensity& d, Weight w, const Matrix& y, const QuadSettings& s) {
    double x = 1.0;
    for (int k = 0; k < 80; ++k, x *= 2.0) {
        const double growth = std::max(1.0, matcore::inf_norm(matcore::expm(y * x)));
        if (weight_tail(d, w, x) * growth < s.truncation_tail) return x;
    }
    throw NumericalError("truncation_point: weight tail does not decay (divergent integral)");
}

Matrix transform_closed_form(const JumpDensity& d, Weight w, const Matrix& y) {
    matcore::require_square(y, "jump transform");
    const auto n = y.rows();
    if (d.is_none()) return Matrix::Zero(n, n);
    check_stable_enough(d, y);
    const Matrix id = Matrix::Identity(n, n);
    if (d.kind() == DensityKind::exponential) {
        const auto& e = d.as_exponential();
        const Matrix inv = matcore::solve(e.rate * id - y, id, "exponential transform");
        return (w == Weight::density ? e.weight * e.rate : e.weight) * inv;
    }
    const auto& p = d.as_phase_type();
    const Vector exit = w == Weight::density ? Vector(-(p.gen * Vector::Ones(p.gen.rows())))
                                             : Vector(Vector::Ones(p.gen.rows()));
    return phase_type_kron(p, exit, y);
}

Matrix transform_adaptive(const JumpDensity& d, Weight w, const Matrix& y, const QuadSettings& s,
                          AdaptiveStats* stats) {
    matcore::require_square(y, "jump transform");
    const auto n = y.rows();
    if (d.is_none()) return Matrix::Zero(n, n);
    check_stable_enough(d, y);
    const double x_max = truncation_point(d, w, y, s);
    std::vector<double> breaks;
    for (double b = 0.125; b < x_max; b *= 2.0) breaks.push_back(b);
    auto integrand = [&](double x) -> Matrix { return weight_value(d, w, x) * matcore::expm(y * x); };
    return integrate(integrand, 0.0, x_max, s, breaks, stats);
}

namespace {

Matrix transform(const JumpDensity& d, Weight w, const Matrix& y, const QuadSettings& s) {
    return s.method == QuadMethod::closed_form ? transform_closed_form(d, w, y)
                                               : transform_adaptive(d, w, y, s);
}

// Transforms of structurally equal densities are computed once per call.
class TransformCache {
public:
    TransformCache(const Matrix& y, Weight w, const QuadSettings& s) : y_(y), w_(w), s_(s) {}

    const Matrix& get(const JumpDensity& d) {
        for (const auto& [key, value] : entries_) {
            if (*key == d) return value;
        }
        entries_.emplace_back(&d, transform(d, w_, y_, s_));
        return entries_.back().second;
    }

private:
    const Matrix& y_;
    Weight w_;
    const QuadSettings& s_;
    std::deque<std::pair<const JumpDensity*, Matrix>> entries_;
};

void require_rows_at_most(const Matrix& x, const Vector& cap, const char* what) {
    const Vector rows = x.rowwise().sum();
    const double tol = 1e-8 * std::max(1.0, cap.cwiseAbs().maxCoeff());
    if (((rows - cap).array() > tol).any()) {
        throw std::invalid_argument(std::string(what) + ": row sums exceed their bound");
    }
}

}  // namespace

Matrix exp_transform(const JumpDensity& d, const Matrix& y, const QuadSettings& s) {
    return transform(d, Weight::density, y, s);
}

Matrix tail_transform(const JumpDensity& d, const Matrix& y, const QuadSettings& s) {
    return transform(d, Weight::tail_mass, y, s);
}

JumpTerms jump_terms(const MmLevyModel& m, const Matrix& y, Weight w, const QuadSettings& s) {
    const auto n = m.n();
    if (y.rows() != n || y.cols() != n) throw std::invalid_argument("jump_terms: dimension mismatch");
    if (!y.allFinite()) throw std::invalid_argument("jump_terms: non-finite exponent");
    TransformCache cache(y, w, s);
    JumpTerms out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nu = m.nu[static_cast<std::size_t>(i)];
        if (!nu.is_none()) out.within.row(i) = cache.get(nu).row(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& mu = m.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (i == j || mu.is_none() || m.Q(i, j) == 0.0) continue;
            out.switching.row(i) += m.Q(i, j) * cache.get(mu).row(j);
        }
    }
    return out;
}

namespace {

Matrix w_exponent(const MmLevyModel& m, double tau, const Matrix& w) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const auto n = m.n();
    if (w.rows() != n || w.cols() != n) throw std::invalid_argument("W: dimension mismatch");
    require_rows_at_most(w, Vector::Ones(n), "W");
    return (w - Matrix::Identity(n, n)) / tau;
}

}  // namespace

Matrix h_of(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s) {
    const auto terms = jump_terms(m, w_exponent(m, tau, w), Weight::density, s);
    return terms.within - matcore::diag(m.jump_rates());
}

Matrix k_of(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s) {
    const auto terms = jump_terms(m, w_exponent(m, tau, w), Weight::density, s);
    return m.Q.cwiseProduct(m.U0) + terms.switching;
}

Matrix h_plus_k(const MmLevyModel& m, double tau, const Matrix& w, const QuadSettings& s) {
    const auto terms = jump_terms(m, w_exponent(m, tau, w), Weight::density, s);
    return terms.within - matcore::diag(m.jump_rates()) + m.Q.cwiseProduct(m.U0) + terms.switching;
}

Matrix c_hat(const MmLevyModel& m, const Matrix& x, const Vector& b, const QuadSettings& s) {
    const auto n = m.n();
    if (x.rows() != n || x.cols() != n || b.size() != n) {
        throw std::invalid_argument("c_hat: dimension mismatch");
    }
    require_rows_at_most(x, b, "c_hat");
    const auto terms = jump_terms(m, x - matcore::diag(b), Weight::density, s);
    Matrix qu = m.Q.cwiseProduct(m.U0);
    qu.diagonal().setZero();
    return qu + terms.within + terms.switching;
}

Matrix lambda_of(const MmLevyModel& m, const Matrix& g, const QuadSettings& s) {
    const auto n = m.n();
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument("lambda_of: dimension mismatch");
    require_rows_at_most(g, Vector::Zero(n), "lambda_of");
    const auto terms = jump_terms(m, g, Weight::tail_mass, s);
    return terms.within + terms.switching;
}

}  // namespace mmlevy::quad
