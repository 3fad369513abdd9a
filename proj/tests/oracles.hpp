#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library's quadrature or solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mmlevy/model.hpp"

namespace oracle {

using mmlevy::Matrix;
using mmlevy::Vector;

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton on P_k.
inline void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(k), 0.0);
    w.assign(static_cast<std::size_t>(k), 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < k; ++i) {
        double z = std::cos(pi * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= k; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// Composite Gauss-Legendre rule for matrix-valued integrands.
inline Matrix composite_gl(const std::function<Matrix(double)>& f, double lo, double hi, int panels, int order = 20) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    Matrix sum;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Matrix v = f(a + 0.5 * h * (x[i] + 1.0));
            if (sum.size() == 0) sum = Matrix::Zero(v.rows(), v.cols());
            sum += 0.5 * h * w[i] * v;
        }
    }
    return sum;
}

/// Scalar composite Gauss-Legendre.
inline double composite_gl(const std::function<double(double)>& f, double lo, double hi, int panels, int order = 20) {
    return composite_gl([&](double x) { return Matrix::Constant(1, 1, f(x)); }, lo, hi, panels, order)(0, 0);
}

/// vec(D_c X + X D_b) = C by a dense Kronecker system.
inline Matrix kron_sylvester(const Vector& c, const Vector& b, const Matrix& rhs) {
    const auto n = rhs.rows();
    const auto m = rhs.cols();
    Matrix op = Matrix::Zero(n * m, n * m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) op(j * n + i, j * n + i) = c(i) + b(j);
    }
    const Eigen::Map<const Vector> r(rhs.data(), n * m);
    const Vector x = op.partialPivLu().solve(r);
    return Eigen::Map<const Matrix>(x.data(), n, m);
}

/// vec(D_c X - X A) = C by a dense Kronecker system.
inline Matrix kron_left_diag_sylvester(const Vector& c, const Matrix& a, const Matrix& rhs) {
    const auto n = rhs.rows();
    const Matrix id = Matrix::Identity(n, n);
    Matrix op = Matrix::Zero(n * n, n * n);
    // vec(D_c X) = (I kron D_c) vec X,  vec(X A) = (A^T kron I) vec X
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            op.block(j * n, l * n, n, n) = -a(l, j) * id;
        }
        op.block(j * n, j * n, n, n) += c.asDiagonal();
    }
    const Eigen::Map<const Vector> r(rhs.data(), n * n);
    const Vector x = op.partialPivLu().solve(r);
    return Eigen::Map<const Matrix>(x.data(), n, n);
}

/// Solvent X of A2 X^2 + A1 X + A0 = 0 whose eigenvalues are the n
/// eigenvalues of the companion pencil with the smallest real parts,
/// computed from the invariant subspace [I; X].
inline Matrix quadratic_solvent(const Matrix& a2, const Matrix& a1, const Matrix& a0) {
    const auto n = a0.rows();
    Matrix comp = Matrix::Zero(2 * n, 2 * n);
    comp.topRightCorner(n, n) = Matrix::Identity(n, n);
    const auto lu = a2.partialPivLu();
    comp.bottomLeftCorner(n, n) = -lu.solve(a0);
    comp.bottomRightCorner(n, n) = -lu.solve(a1);
    Eigen::EigenSolver<Matrix> es(comp);
    const auto vals = es.eigenvalues();
    const auto vecs = es.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(2 * n));
    for (Eigen::Index i = 0; i < 2 * n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return vals(x).real() < vals(y).real(); });
    Eigen::MatrixXcd u(2 * n, n);
    for (Eigen::Index k = 0; k < n; ++k) u.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    const Eigen::MatrixXcd x = u.bottomRows(n) * u.topRows(n).inverse();
    return x.real();
}

/// Random subgenerator with off-diagonal rates in [0, scale] and row
/// deficits in [0, deficit].
inline Matrix random_subgenerator(std::mt19937& rng, int n, double scale = 1.0, double deficit = 0.5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            a(i, j) = scale * u(rng);
            row += a(i, j);
        }
        a(i, i) = -row - deficit * u(rng);
    }
    return a;
}

inline Matrix random_generator(std::mt19937& rng, int n, double scale = 1.0) {
    return random_subgenerator(rng, n, scale, 0.0);
}

/// Random nonnegative matrix with row sums equal to `rows` times a factor in [lo, 1].
inline Matrix random_rows(std::mt19937& rng, const Vector& rows, double lo = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = rows.size();
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) w(i, j) = u(rng) + 1e-3;
        const double f = lo + (1.0 - lo) * u(rng);
        w.row(i) *= f * rows(i) / w.row(i).sum();
    }
    return w;
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

/// Two-phase model without jumps.
inline mmlevy::MmLevyModel no_jump_model(const Vector& a, const Vector& sigma2, const Matrix& q) {
    return mmlevy::MmLevyModel(a, sigma2, q, std::vector<mmlevy::JumpDensity>(static_cast<std::size_t>(a.size())));
}

}  // namespace oracle
