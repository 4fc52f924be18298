#include "dmvo/types.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/linalg.hpp"

#include <cmath>

namespace dmvo
{
    MarketParams MarketParams::single(double mu, double variance, double r, double T, double gamma)
    {
        if (!(variance >= 0.0))
            throw DomainError("variance must be non-negative");
        MarketParams m;
        m.mu = Vector::Constant(1, mu);
        m.sigma = Matrix::Constant(1, 1, std::sqrt(variance));
        m.r = r;
        m.T = T;
        m.gamma = gamma;
        return m;
    }

    MarketParams MarketParams::from_covariance(const Vector &mu, const Matrix &cov, double r, double T, double gamma)
    {
        if (cov.rows() != mu.size() || cov.cols() != mu.size())
            throw DomainError("covariance dimensions do not match drift vector");
        MarketParams m;
        m.mu = mu;
        m.sigma = psd_factor(cov, "covariance");
        m.r = r;
        m.T = T;
        m.gamma = gamma;
        return m;
    }

    void MarketParams::validate() const
    {
        if (mu.size() == 0)
            throw DomainError("market must have at least one asset");
        if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
            throw DomainError("volatility loading matrix must be N x N");
        if (!mu.allFinite() || !sigma.allFinite())
            throw DomainError("market parameters must be finite");
        if (!(gamma > 0.0))
            throw DomainError("risk aversion gamma must be positive");
        if (!(T > 0.0))
            throw DomainError("horizon T must be positive");
        if (!(r >= 0.0))
            throw DomainError("riskless rate r must be non-negative");
    }

    Matrix CevParams::scale_covariance() const
    {
        return sigma_bar.asDiagonal() * corr * sigma_bar.asDiagonal();
    }

    CevParams CevParams::single(double mu, double sigma_bar, double alpha, double r, double T, double gamma)
    {
        CevParams c;
        c.mu = Vector::Constant(1, mu);
        c.sigma_bar = Vector::Constant(1, sigma_bar);
        c.alpha = Vector::Constant(1, alpha);
        c.corr = Matrix::Identity(1, 1);
        c.r = r;
        c.T = T;
        c.gamma = gamma;
        return c;
    }

    void CevParams::validate() const
    {
        const auto n = mu.size();
        if (n == 0)
            throw DomainError("market must have at least one asset");
        if (sigma_bar.size() != n || alpha.size() != n || corr.rows() != n || corr.cols() != n)
            throw DomainError("CEV parameter dimensions are inconsistent");
        if (!mu.allFinite() || !sigma_bar.allFinite() || !alpha.allFinite())
            throw DomainError("CEV parameters must be finite");
        if ((sigma_bar.array() < 0.0).any())
            throw DomainError("sigma_bar must be non-negative");
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(corr(i, i) - 1.0) > 1e-12)
                throw DomainError("correlation matrix must have unit diagonal");
        require_symmetric(corr, "correlation matrix");
        if (!(gamma > 0.0))
            throw DomainError("risk aversion gamma must be positive");
        if (!(T > 0.0))
            throw DomainError("horizon T must be positive");
        if (!(r >= 0.0))
            throw DomainError("riskless rate r must be non-negative");
    }

    Policy Policy::from_parts(Vector myopic, Vector hedging)
    {
        Policy p;
        p.theta = myopic + hedging;
        p.myopic = std::move(myopic);
        p.hedging = std::move(hedging);
        return p;
    }
}
