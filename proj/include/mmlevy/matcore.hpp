#pragma once

// Dense real matrix kernels shared by every solver.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmlevy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Raised when a numerical kernel cannot produce a meaningful result
/// (singular system, overflow, divergent integral).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace matcore {

inline constexpr double kDefaultStructureTol = 1e-10;
inline constexpr double kIrreducibleTol = 1e-12;

struct StructuralReport {
    bool is_nonnegative = false;
    bool is_stochastic_rows = false;
    bool is_substochastic_rows = false;
    bool is_generator = false;
    bool is_subgenerator = false;
    bool is_z_matrix = false;
    bool is_m_matrix = false;
    bool is_irreducible = false;
    double tol = kDefaultStructureTol;
};

void require_square(const Matrix& a, const char* what);

/// Maximum absolute row sum.
double inf_norm(const Matrix& a);

/// e^A by scaling and squaring with a diagonal Padé approximant
/// (orders 3, 5, 7, 9, 13 selected from the 1-norm).
Matrix expm(const Matrix& a);

ComplexVector eigenvalues(const Matrix& a);
double spectral_radius(const Matrix& a);
/// Largest real part over the spectrum.
double spectral_abscissa(const Matrix& a);

/// Solves diag(c) X + X diag(b) = C entrywise.
Matrix diag_sylvester_solve(const Vector& c, const Vector& b, const Matrix& rhs);

/// Solves diag(c) X - X A = C one row at a time:
/// row i of X is C_i (c_i I - A)^{-1}.
Matrix left_diag_sylvester_solve(const Vector& c, const Matrix& a, const Matrix& rhs);

/// Strong connectivity of the graph with an edge i->j whenever i != j and
/// |a_ij| > tol.
bool is_irreducible(const Matrix& a, double tol = kIrreducibleTol);

StructuralReport structure_check(const Matrix& a, double tol = kDefaultStructureTol);

/// diag(v)
inline Matrix diag(const Vector& v) { return v.asDiagonal(); }

/// LU solve that refuses numerically singular systems.
Matrix solve(const Matrix& a, const Matrix& rhs, const char* what);
Vector solve_vec(const Matrix& a, const Vector& rhs, const char* what);

}  // namespace matcore
}  // namespace mmlevy
