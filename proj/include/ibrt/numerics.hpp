#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ibrt/matrix.hpp"

namespace ibrt {

struct LinearSolveReport {
    Vector solution;
    double condition = 0.0;     ///< 1-norm condition number estimate
    double pivot_growth = 0.0;  ///< max |U| / max |A|
};

/// LU factorization with partial pivoting.
class LU {
public:
    /// Throws SingularMatrix when a pivot is exactly zero.
    explicit LU(const Matrix& a);

    Vector solve(const Vector& b) const;
    /// Solves A^T x = b.
    Vector solve_transpose(const Vector& b) const;
    /// Hager-Higham estimate of ||A^-1||_1.
    double inverse_norm_one_estimate() const;
    double pivot_growth() const noexcept { return growth_; }
    double norm_one() const noexcept { return norm_one_; }

private:
    std::size_t n_;
    Matrix lu_;
    std::vector<std::size_t> perm_;
    double growth_ = 0.0;
    double norm_one_ = 0.0;
};

LinearSolveReport lu_solve(const Matrix& a, const Vector& b);

struct SvdResult {
    Vector sigma;  ///< descending
    Matrix v;      ///< right singular vectors, column k pairs with sigma[k]
};

/// One-sided Jacobi SVD of a square or tall matrix.
SvdResult svd(const Matrix& a);

Vector singular_values(const Matrix& a);
double sigma_min(const Matrix& a);

/// Number of singular values at or below `tol`.
std::size_t numerical_nullity(const Matrix& a, double tol);

/// Unit vector x minimizing ||x^T A||, i.e. the left singular direction of sigma_min.
Vector left_null_vector(const Matrix& a);

/// Maximum number of QR sweeps per unit of matrix order.
inline constexpr std::size_t kEigenSweepFactor = 100;

/// Eigenvalues by balancing, Householder Hessenberg reduction and
/// double-shift QR. Sorted by descending real part, then imaginary part.
/// Throws EigenNonConvergence after kEigenSweepFactor * n sweeps.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

}  // namespace ibrt
