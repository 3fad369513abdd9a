#include "mmlevy/matcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace mmlevy::matcore {

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
}

double inf_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

// Padé coefficients and 1-norm thresholds from Higham (2005).
constexpr std::array<double, 4> kPade3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                        30270240.0,    2162160.0,    110880.0,     3960.0,
                                        90.0,          1.0};
constexpr std::array<double, 14> kPade13{
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low_order(const Matrix& a, const std::array<double, N>& b) {
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix u_even = b[1] * id;
    Matrix v = b[0] * id;
    Matrix power = id;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        v += b[k] * power;
        if (k + 1 < N) u_even += b[k + 1] * power;
    }
    const Matrix u = a * u_even;
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
    const auto& b = kPade13;
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                          b[3] * a2 + b[1] * id);
    const Matrix v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
    require_square(a, "expm");
    if (!a.allFinite()) throw std::invalid_argument("expm: non-finite entries");
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    Matrix r;
    if (norm1 <= kTheta3) {
        r = pade_low_order(a, kPade3);
    } else if (norm1 <= kTheta5) {
        r = pade_low_order(a, kPade5);
    } else if (norm1 <= kTheta7) {
        r = pade_low_order(a, kPade7);
    } else if (norm1 <= kTheta9) {
        r = pade_low_order(a, kPade9);
    } else {
        const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
        r = pade13(a / std::ldexp(1.0, s));
        for (int k = 0; k < s; ++k) r = r * r;
    }
    if (!r.allFinite()) throw NumericalError("expm: overflow (norm too large)");
    return r;
}

ComplexVector eigenvalues(const Matrix& a) {
    require_square(a, "eigenvalues");
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: QR iteration failed");
    return es.eigenvalues();
}

double spectral_radius(const Matrix& a) { return eigenvalues(a).cwiseAbs().maxCoeff(); }

double spectral_abscissa(const Matrix& a) { return eigenvalues(a).real().maxCoeff(); }

Matrix diag_sylvester_solve(const Vector& c, const Vector& b, const Matrix& rhs) {
    const auto n = rhs.rows();
    const auto m = rhs.cols();
    if (c.size() != n || b.size() != m) {
        throw std::invalid_argument("diag_sylvester_solve: dimension mismatch");
    }
    Matrix x(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double d = c(i) + b(j);
            if (d == 0.0) throw NumericalError("diag_sylvester_solve: singular operator (c_i + b_j = 0)");
            x(i, j) = rhs(i, j) / d;
        }
    }
    return x;
}

Matrix left_diag_sylvester_solve(const Vector& c, const Matrix& a, const Matrix& rhs) {
    require_square(a, "left_diag_sylvester_solve");
    const auto n = a.rows();
    if (c.size() != rhs.rows() || rhs.cols() != n) {
        throw std::invalid_argument("left_diag_sylvester_solve: dimension mismatch");
    }
    Matrix x(rhs.rows(), n);
    const Matrix id = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < rhs.rows(); ++i) {
        // x_i (c_i I - A) = rhs_i  <=>  (c_i I - A)^T x_i^T = rhs_i^T
        const Matrix op = (c(i) * id - a).transpose();
        Eigen::PartialPivLU<Matrix> lu(op);
        if (!(lu.rcond() > 1e-15)) {
            throw NumericalError("left_diag_sylvester_solve: singular operator");
        }
        x.row(i) = lu.solve(rhs.row(i).transpose()).transpose();
    }
    return x;
}

bool is_irreducible(const Matrix& a, double tol) {
    require_square(a, "is_irreducible");
    const auto n = a.rows();
    if (n == 1) return true;
    // Strongly connected iff every node is reachable from node 0 in the
    // graph and in its transpose.
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (Eigen::Index v = 0; v < n; ++v) {
                if (v == u || seen[static_cast<std::size_t>(v)]) continue;
                const double w = transpose ? a(v, u) : a(u, v);
                if (std::abs(w) > tol) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
    };
    return reaches_all(false) && reaches_all(true);
}

StructuralReport structure_check(const Matrix& a, double tol) {
    require_square(a, "structure_check");
    const auto n = a.rows();
    StructuralReport rep;
    rep.tol = tol;

    double min_entry = a.minCoeff();
    double min_offdiag = std::numeric_limits<double>::infinity();
    double max_offdiag = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            min_offdiag = std::min(min_offdiag, a(i, j));
            max_offdiag = std::max(max_offdiag, a(i, j));
        }
    }
    if (n == 1) min_offdiag = max_offdiag = 0.0;
    const Vector rows = a.rowwise().sum();

    rep.is_nonnegative = min_entry >= -tol;
    rep.is_substochastic_rows = rep.is_nonnegative && (rows.array() <= 1.0 + tol).all();
    rep.is_stochastic_rows = rep.is_nonnegative && ((rows.array() - 1.0).abs() <= tol).all();
    rep.is_subgenerator = min_offdiag >= -tol && (rows.array() <= tol).all();
    rep.is_generator = min_offdiag >= -tol && (rows.array().abs() <= tol).all();
    rep.is_z_matrix = max_offdiag <= tol;
    rep.is_m_matrix = rep.is_z_matrix && eigenvalues(a).real().minCoeff() >= -tol;
    rep.is_irreducible = is_irreducible(a, kIrreducibleTol);
    return rep;
}

Matrix solve(const Matrix& a, const Matrix& rhs, const char* what) {
    require_square(a, what);
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-15) || !std::isfinite(rc)) {
        throw NumericalError(std::string(what) + ": numerically singular system");
    }
    return lu.solve(rhs);
}

Vector solve_vec(const Matrix& a, const Vector& rhs, const char* what) {
    return solve(a, Matrix(rhs), what).col(0);
}

}  // namespace mmlevy::matcore
