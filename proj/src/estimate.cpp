#include "dmvo/estimate.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/linalg.hpp"

#include <cmath>
#include <sstream>

namespace dmvo::estimate
{
    ReturnsPanel to_returns(const PriceSeries &p)
    {
        const Eigen::Index rows = p.prices.rows();
        if (rows < 2)
            throw DataError("return computation needs at least two price rows");

        for (Eigen::Index k = 0; k < rows; ++k)
            for (Eigen::Index i = 0; i < p.prices.cols(); ++i)
                if (!(p.prices(k, i) > 0.0) || !std::isfinite(p.prices(k, i)))
                {
                    std::ostringstream msg;
                    msg << "non-positive or non-finite price at row " << k << ", column " << i;
                    throw DataError(msg.str(), static_cast<std::size_t>(k));
                }

        ReturnsPanel out;
        out.returns = (p.prices.bottomRows(rows - 1).array() / p.prices.topRows(rows - 1).array()) - 1.0;
        if (p.times.size() == static_cast<std::size_t>(rows))
            out.times.assign(p.times.begin() + 1, p.times.end());
        return out;
    }

    Matrix sample_covariance(const Matrix &obs, double periods_per_year)
    {
        const double n = static_cast<double>(obs.rows());
        if (obs.rows() < 2)
            throw WarmupError("covariance needs at least two observations");
        const Eigen::RowVectorXd mean = obs.colwise().mean();
        const Matrix centered = obs.rowwise() - mean;
        Matrix cov = centered.transpose() * centered * (periods_per_year / (n - 1.0));
        // Exact symmetry for the downstream pivot test.
        return 0.5 * (cov + cov.transpose());
    }

    ParamEstimate rolling_estimate(const ReturnsPanel &r, std::size_t t_index, std::size_t batch_len)
    {
        if (batch_len < 2)
            throw DomainError("batch length must be at least 2");
        if (t_index < batch_len)
        {
            std::ostringstream msg;
            msg << "insufficient history: decision row " << t_index << " needs " << batch_len << " prior returns";
            throw WarmupError(msg.str());
        }
        if (t_index > r.n_obs())
            throw DomainError("decision row lies beyond the returns panel");

        ParamEstimate est;
        est.batch_start = t_index - batch_len;
        est.batch_end = t_index;
        const auto batch = r.returns.middleRows(static_cast<Eigen::Index>(est.batch_start),
                                                static_cast<Eigen::Index>(batch_len));
        est.mu_hat = batch.colwise().mean().transpose() * kPeriodsPerYear;
        est.sigma_hat = sample_covariance(batch);
        return est;
    }

    bool is_singular(const Matrix &sigma)
    {
        try
        {
            Cholesky chol(sigma);
            return false;
        }
        catch (const DefinitenessError &)
        {
            return true;
        }
    }

    Matrix regularize_covariance(const Matrix &sigma)
    {
        if (!is_singular(sigma))
            return sigma;
        const double n = static_cast<double>(sigma.rows());
        const double trace = sigma.trace();
        const double ridge = trace > 0.0 ? kRidge * trace / n : kRidge;
        return sigma + ridge * Matrix::Identity(sigma.rows(), sigma.cols());
    }
}
