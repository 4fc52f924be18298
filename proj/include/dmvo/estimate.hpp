#pragma once

#include "dmvo/types.hpp"

#include <vector>

namespace dmvo::estimate
{
    /// Weekly simple returns: returns(k, i) = P(k+1, i) / P(k, i) - 1.
    struct ReturnsPanel
    {
        Matrix returns;
        /// Stamp of the later price in each return.
        std::vector<double> times;

        std::size_t n_obs() const { return static_cast<std::size_t>(returns.rows()); }
        std::size_t n_assets() const { return static_cast<std::size_t>(returns.cols()); }
    };

    /// Annualized batch moments over return rows [batch_start, batch_end).
    struct ParamEstimate
    {
        Vector mu_hat;
        Matrix sigma_hat;
        std::size_t batch_start = 0;
        std::size_t batch_end = 0;
    };

    inline constexpr std::size_t kDefaultBatch = 26;
    inline constexpr double kPeriodsPerYear = 52.0;
    inline constexpr double kRidge = 1e-6;

    ReturnsPanel to_returns(const PriceSeries &p);

    /**
     * Overlapping-batch estimate for a decision at price row t_index: uses the
     * batch_len returns ending at row t_index, i.e. prices up to and including
     * t_index and nothing later. Mean and covariance (divisor n - 1) are scaled
     * by 52.
     */
    ParamEstimate rolling_estimate(const ReturnsPanel &r, std::size_t t_index, std::size_t batch_len = kDefaultBatch);

    /**
     * Returns sigma unchanged when it passes the pivot test, otherwise
     * sigma + kRidge * trace(sigma)/N * I. A zero-trace matrix gets kRidge * I.
     */
    Matrix regularize_covariance(const Matrix &sigma);

    /// True when the Cholesky pivot test rejects sigma.
    bool is_singular(const Matrix &sigma);

    /**
     * Annualized sample covariance (divisor n - 1) of a block of observations,
     * one row per observation.
     */
    Matrix sample_covariance(const Matrix &obs, double periods_per_year = kPeriodsPerYear);
}
