#pragma once

#include "dmvo/types.hpp"

#include <string>

namespace dmvo
{
    /// Relative pivot floor for positive-definiteness: pivots below this times max diagonal are rejected.
    inline constexpr double kPivotTolerance = 1e-12;

    /// Symmetry tolerance for covariance inputs.
    inline constexpr double kSymmetryTolerance = 1e-12;

    /**
     * Cholesky factor L (A = L L^T) of a symmetric positive-definite matrix.
     *
     * Construction throws DefinitenessError naming the first pivot that
     * falls below kPivotTolerance * max|diag(A)|.
     */
    class Cholesky
    {
    public:
        explicit Cholesky(const Matrix &a, const std::string &what = "matrix");

        Vector solve(const Vector &b) const;
        Matrix solve(const Matrix &b) const;
        const Matrix &lower() const { return l_; }

    private:
        Matrix l_;
    };

    /// Throws DomainError when max |A_ij - A_ji| exceeds kSymmetryTolerance.
    void require_symmetric(const Matrix &a, const std::string &what);

    /**
     * Square-root factor F with F F^T = A for a symmetric positive
     * semidefinite A. Uses Cholesky when A is definite and a clipped
     * eigen-decomposition otherwise. Throws DefinitenessError when A has an
     * eigenvalue below -1e-10 * max|diag(A)|.
     */
    Matrix psd_factor(const Matrix &a, const std::string &what = "matrix");
}
