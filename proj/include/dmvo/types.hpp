#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace dmvo
{
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /**
     * Constant-coefficient GBM market.
     *
     * Prices follow dS_i/S_i = mu_i dt + sigma_i . dw with sigma the N x N
     * loading matrix, so the instantaneous covariance is sigma * sigma^T.
     * All rates are annualized; gamma is the absolute risk aversion
     * (1/currency) of the mean-variance investor.
     */
    struct MarketParams
    {
        Vector mu;
        Matrix sigma;
        double r = 0.0;
        double T = 1.0;
        double gamma = 1.0;

        std::size_t n_assets() const { return static_cast<std::size_t>(mu.size()); }
        Matrix covariance() const { return sigma * sigma.transpose(); }

        /// One-asset market from drift and variance rate (sigma = sqrt(variance)).
        static MarketParams single(double mu, double variance, double r, double T, double gamma);

        /// Market whose loading matrix is the Cholesky factor of `cov`.
        static MarketParams from_covariance(const Vector &mu, const Matrix &cov, double r, double T, double gamma);

        void validate() const;
    };

    /**
     * CEV market: dS_i/S_i = mu_i dt + sigma_bar_i S_i^(alpha_i/2) dw_i,
     * with corr the correlation of the driving Brownian motions.
     * alpha = 0 recovers GBM with volatility sigma_bar.
     */
    struct CevParams
    {
        Vector mu;
        Vector sigma_bar;
        Vector alpha;
        Matrix corr;
        double r = 0.0;
        double T = 1.0;
        double gamma = 1.0;

        std::size_t n_assets() const { return static_cast<std::size_t>(mu.size()); }

        /// Scale covariance diag(sigma_bar) corr diag(sigma_bar), i.e. the covariance at S = 1.
        Matrix scale_covariance() const;

        static CevParams single(double mu, double sigma_bar, double alpha, double r, double T, double gamma);

        void validate() const;
    };

    /// Money amounts per asset split into myopic and hedging demand. theta == myopic + hedging.
    struct Policy
    {
        Vector theta;
        Vector myopic;
        Vector hedging;

        static Policy from_parts(Vector myopic, Vector hedging);
    };

    /// Price panel: rows are time stamps, columns are assets.
    struct PriceSeries
    {
        std::vector<double> times;
        Matrix prices;
        std::vector<std::string> tickers;
        std::vector<std::string> dates;

        std::size_t n_rows() const { return static_cast<std::size_t>(prices.rows()); }
        std::size_t n_assets() const { return static_cast<std::size_t>(prices.cols()); }
    };

    /// Recorded backtest state per week: total wealth = bond + stock value.
    struct WealthPath
    {
        std::vector<std::size_t> week_index;
        std::vector<double> times;
        std::vector<double> wealth;
        std::vector<double> bond;
        std::vector<double> stock_value;

        std::size_t size() const { return wealth.size(); }
    };

    /// Value with its Monte Carlo standard error.
    struct Estimate
    {
        double value = 0.0;
        double std_error = 0.0;
    };
}
