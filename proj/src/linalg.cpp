#include "dmvo/linalg.hpp"
#include "dmvo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmvo
{
    Cholesky::Cholesky(const Matrix &a, const std::string &what)
    {
        const Eigen::Index n = a.rows();
        if (n == 0 || a.cols() != n)
            throw DomainError(what + " must be a non-empty square matrix");

        const double scale = a.diagonal().cwiseAbs().maxCoeff();
        const double floor = kPivotTolerance * scale;

        l_ = Matrix::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            double pivot = a(j, j);
            for (Eigen::Index k = 0; k < j; ++k)
                pivot -= l_(j, k) * l_(j, k);

            if (!(pivot > floor))
            {
                std::ostringstream msg;
                msg << what << " is not positive definite: pivot " << j << " = " << pivot
                    << " (threshold " << floor << ")";
                throw DefinitenessError(msg.str(), static_cast<std::size_t>(j));
            }

            const double d = std::sqrt(pivot);
            l_(j, j) = d;
            for (Eigen::Index i = j + 1; i < n; ++i)
            {
                double s = a(i, j);
                for (Eigen::Index k = 0; k < j; ++k)
                    s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / d;
            }
        }
    }

    Vector Cholesky::solve(const Vector &b) const
    {
        Vector y = l_.triangularView<Eigen::Lower>().solve(b);
        return l_.transpose().triangularView<Eigen::Upper>().solve(y);
    }

    Matrix Cholesky::solve(const Matrix &b) const
    {
        Matrix y = l_.triangularView<Eigen::Lower>().solve(b);
        return l_.transpose().triangularView<Eigen::Upper>().solve(y);
    }

    void require_symmetric(const Matrix &a, const std::string &what)
    {
        if (a.rows() != a.cols())
            throw DomainError(what + " must be square");
        const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
        if (asym > kSymmetryTolerance)
        {
            std::ostringstream msg;
            msg << what << " is not symmetric (max asymmetry " << asym << ")";
            throw DomainError(msg.str());
        }
    }

    Matrix psd_factor(const Matrix &a, const std::string &what)
    {
        require_symmetric(a, what);
        Eigen::LLT<Matrix> llt(a);
        if (llt.info() == Eigen::Success)
            return llt.matrixL();

        Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
        const Vector &lambda = eig.eigenvalues();
        const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < lambda.size(); ++i)
        {
            if (lambda(i) < -1e-10 * scale)
            {
                std::ostringstream msg;
                msg << what << " is not positive semidefinite: eigenvalue " << lambda(i);
                throw DefinitenessError(msg.str(), static_cast<std::size_t>(i));
            }
        }
        const Vector root = lambda.cwiseMax(0.0).cwiseSqrt();
        return eig.eigenvectors() * root.asDiagonal();
    }
}
