/**
 * @file backtest.hpp
 * @brief Weekly self-financing backtest: rolling estimate, strategy money
 *        vector, share conversion, bond balancing, accrual, record.
 *
 * The investor starts from zero wealth. At each decision row t the strategy
 * sees prices up to and including row t, the stock positions are set to the
 * strategy's money amounts, the remainder sits in a riskless bond
 * (negative = borrowing), and P&L over [t, t + dt] comes from share
 * holdings and bond interest only. Short positions are allowed; there are
 * no frictions.
 */
#pragma once

#include "dmvo/estimate.hpp"
#include "dmvo/types.hpp"

#include <string>

namespace dmvo::backtest
{
    enum class StrategyKind
    {
        static_mvo,   ///< omega(target) * notional
        simple_tc,    ///< single-asset GBM policy applied per asset
        multi_tc,     ///< multi-asset GBM policy with the full covariance
        cev_tc,       ///< single-asset CEV policy applied per asset
        cev_multi_tc, ///< multi-asset CEV policy
    };

    struct Strategy
    {
        StrategyKind kind = StrategyKind::simple_tc;
        double target = 0.15; ///< static_mvo only
        double alpha = 0.0;   ///< CEV strategies only

        std::string name() const;
        static Strategy parse(const std::string &name, double target = 0.15, double alpha = 0.0);
    };

    struct BacktestConfig
    {
        Strategy strategy;
        double gamma = 1.0;
        double r = 0.025;
        std::size_t batch_len = estimate::kDefaultBatch;
        double dt = 1.0 / 52.0;
        double notional = 1.0;

        void validate() const;
    };

    struct Ledger
    {
        double bond_cash = 0.0;
        Vector shares;
        double wealth = 0.0;

        double stock_value(const Vector &prices) const { return shares.dot(prices); }
    };

    /// Sets shares = theta / prices and bond = wealth - sum(theta); wealth is carried over.
    Ledger rebalance_step(const Ledger &ledger, const Vector &prices_now, const Vector &theta_money);

    /// Bond grows by e^{r dt}; wealth is re-marked at prices_next.
    Ledger accrue_step(const Ledger &ledger, const Vector &prices_next, double dt, double r);

    /// Per-step ledger checks, relative to the gross position |bond| + sum|shares * price| (at least 1).
    struct LedgerAudit
    {
        double max_rebalance_jump = 0.0;
        double max_identity_residual = 0.0;
        std::size_t steps = 0;
    };

    /**
     * Money vector of `strategy` at decision row t_index. `remaining` is the
     * time left to the horizon in years.
     */
    Vector strategy_money(const PriceSeries &prices, const estimate::ReturnsPanel &returns,
                          std::size_t t_index, const BacktestConfig &cfg, double horizon);

    /// Requires at least batch_len + 2 rows. Decisions run at rows batch_len .. n - 2.
    WealthPath run_backtest(const PriceSeries &prices, const BacktestConfig &cfg, LedgerAudit *audit = nullptr);
}
