#include "dmvo/backtest.hpp"
#include "dmvo/dynamic_policy.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/static_mvo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmvo::backtest
{
    namespace
    {
        double gross(const Ledger &l, const Vector &prices)
        {
            return std::max(1.0, std::abs(l.bond_cash) + (l.shares.array() * prices.array()).abs().sum());
        }

        double regularized_variance(double v)
        {
            return estimate::regularize_covariance(Matrix::Constant(1, 1, v))(0, 0);
        }

        /// Returns of the batch divided elementwise by S_k^(alpha/2), S_k the price opening each return.
        Matrix cev_normalized_batch(const PriceSeries &prices, const estimate::ReturnsPanel &returns,
                                    const estimate::ParamEstimate &est, double alpha)
        {
            const auto start = static_cast<Eigen::Index>(est.batch_start);
            const auto len = static_cast<Eigen::Index>(est.batch_end - est.batch_start);
            Matrix x = returns.returns.middleRows(start, len);
            if (alpha == 0.0)
                return x;
            const Matrix scale = prices.prices.middleRows(start, len).array().pow(0.5 * alpha);
            return x.array() / scale.array();
        }
    }

    std::string Strategy::name() const
    {
        switch (kind)
        {
        case StrategyKind::static_mvo:
            return "static";
        case StrategyKind::simple_tc:
            return "simple";
        case StrategyKind::multi_tc:
            return "multi";
        case StrategyKind::cev_tc:
            return "cev";
        case StrategyKind::cev_multi_tc:
            return "cev-multi";
        }
        return "unknown";
    }

    Strategy Strategy::parse(const std::string &name, double target, double alpha)
    {
        Strategy s;
        s.target = target;
        s.alpha = alpha;
        if (name == "static")
            s.kind = StrategyKind::static_mvo;
        else if (name == "simple")
            s.kind = StrategyKind::simple_tc;
        else if (name == "multi")
            s.kind = StrategyKind::multi_tc;
        else if (name == "cev")
            s.kind = StrategyKind::cev_tc;
        else if (name == "cev-multi")
            s.kind = StrategyKind::cev_multi_tc;
        else
            throw DomainError("unknown strategy '" + name + "' (expected static|simple|multi|cev|cev-multi)");
        return s;
    }

    void BacktestConfig::validate() const
    {
        if (!(gamma > 0.0))
            throw DomainError("risk aversion gamma must be positive");
        if (!(r >= 0.0))
            throw DomainError("riskless rate must be non-negative");
        if (batch_len < 2)
            throw DomainError("batch length must be at least 2");
        if (!(dt > 0.0))
            throw DomainError("dt must be positive");
        if (!std::isfinite(notional))
            throw DomainError("notional must be finite");
    }

    Ledger rebalance_step(const Ledger &ledger, const Vector &prices_now, const Vector &theta_money)
    {
        if (prices_now.size() != theta_money.size())
            throw DomainError("price and money vectors differ in length");
        if (!(prices_now.array() > 0.0).all())
            throw DomainError("rebalancing requires positive prices");

        Ledger out;
        out.shares = theta_money.array() / prices_now.array();
        out.bond_cash = ledger.wealth - theta_money.sum();
        out.wealth = ledger.wealth;
        return out;
    }

    Ledger accrue_step(const Ledger &ledger, const Vector &prices_next, double dt, double r)
    {
        Ledger out = ledger;
        out.bond_cash = ledger.bond_cash * std::exp(r * dt);
        out.wealth = out.bond_cash + ledger.shares.dot(prices_next);
        return out;
    }

    Vector strategy_money(const PriceSeries &prices, const estimate::ReturnsPanel &returns,
                          std::size_t t_index, const BacktestConfig &cfg, double horizon)
    {
        const estimate::ParamEstimate est = estimate::rolling_estimate(returns, t_index, cfg.batch_len);
        const Eigen::Index n = est.mu_hat.size();
        const double t = static_cast<double>(t_index) * cfg.dt;
        const Vector s_now = prices.prices.row(static_cast<Eigen::Index>(t_index)).transpose();

        switch (cfg.strategy.kind)
        {
        case StrategyKind::static_mvo:
        {
            static_mvo::StaticProblem p;
            p.mu = est.mu_hat;
            p.Sigma = estimate::regularize_covariance(est.sigma_hat);
            p.target = cfg.strategy.target;
            return static_mvo::solve_static_mvo(p).omega * cfg.notional;
        }
        case StrategyKind::simple_tc:
        {
            Vector theta(n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const auto m = MarketParams::single(est.mu_hat(i), regularized_variance(est.sigma_hat(i, i)),
                                                    cfg.r, horizon, cfg.gamma);
                theta(i) = dynamic_policy::simple_policy(m, t).theta(0);
            }
            return theta;
        }
        case StrategyKind::multi_tc:
        {
            const auto m = MarketParams::from_covariance(est.mu_hat, estimate::regularize_covariance(est.sigma_hat),
                                                         cfg.r, horizon, cfg.gamma);
            return dynamic_policy::multi_policy(m, t).theta;
        }
        case StrategyKind::cev_tc:
        {
            const Matrix x = cev_normalized_batch(prices, returns, est, cfg.strategy.alpha);
            Vector theta(n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const double scale_var = regularized_variance(estimate::sample_covariance(x.col(i))(0, 0));
                const auto c = CevParams::single(est.mu_hat(i), std::sqrt(scale_var), cfg.strategy.alpha,
                                                 cfg.r, horizon, cfg.gamma);
                theta(i) = dynamic_policy::cev_policy(c, s_now(i), t).theta(0);
            }
            return theta;
        }
        case StrategyKind::cev_multi_tc:
        {
            const Matrix x = cev_normalized_batch(prices, returns, est, cfg.strategy.alpha);
            const Matrix scale_cov = estimate::regularize_covariance(estimate::sample_covariance(x));
            const Vector sd = scale_cov.diagonal().cwiseSqrt();
            CevParams c;
            c.mu = est.mu_hat;
            c.sigma_bar = sd;
            c.alpha = Vector::Constant(n, cfg.strategy.alpha);
            c.corr = sd.cwiseInverse().asDiagonal() * scale_cov * sd.cwiseInverse().asDiagonal();
            c.corr = 0.5 * (c.corr + c.corr.transpose());
            c.corr.diagonal().setOnes();
            c.r = cfg.r;
            c.T = horizon;
            c.gamma = cfg.gamma;
            return dynamic_policy::cev_policy_multi(c, s_now, t).theta;
        }
        }
        throw DomainError("unknown strategy kind");
    }

    WealthPath run_backtest(const PriceSeries &prices, const BacktestConfig &cfg, LedgerAudit *audit)
    {
        cfg.validate();
        const std::size_t rows = prices.n_rows();
        if (rows < cfg.batch_len + 2)
        {
            std::ostringstream msg;
            msg << "backtest needs at least " << (cfg.batch_len + 2) << " weekly rows, got " << rows;
            throw WarmupError(msg.str());
        }

        const estimate::ReturnsPanel returns = estimate::to_returns(prices);
        const double horizon = static_cast<double>(rows - 1) * cfg.dt;

        WealthPath path;
        auto record = [&](std::size_t row, const Ledger &l, const Vector &p) {
            path.week_index.push_back(row);
            path.times.push_back(static_cast<double>(row) * cfg.dt);
            path.wealth.push_back(l.wealth);
            path.bond.push_back(l.bond_cash);
            path.stock_value.push_back(l.stock_value(p));
        };

        Ledger ledger;
        ledger.shares = Vector::Zero(static_cast<Eigen::Index>(prices.n_assets()));
        record(cfg.batch_len, ledger, prices.prices.row(static_cast<Eigen::Index>(cfg.batch_len)).transpose());

        LedgerAudit local;
        for (std::size_t t = cfg.batch_len; t + 1 < rows; ++t)
        {
            const Vector p_now = prices.prices.row(static_cast<Eigen::Index>(t)).transpose();
            const Vector p_next = prices.prices.row(static_cast<Eigen::Index>(t + 1)).transpose();

            const Vector theta = strategy_money(prices, returns, t, cfg, horizon);
            const double before = ledger.wealth;
            ledger = rebalance_step(ledger, p_now, theta);

            const double marked = ledger.bond_cash + ledger.stock_value(p_now);
            local.max_rebalance_jump = std::max(local.max_rebalance_jump,
                                                std::abs(marked - before) / gross(ledger, p_now));

            ledger = accrue_step(ledger, p_next, cfg.dt, cfg.r);
            const double identity = ledger.wealth - (ledger.bond_cash + ledger.stock_value(p_next));
            local.max_identity_residual = std::max(local.max_identity_residual,
                                                   std::abs(identity) / gross(ledger, p_next));
            ++local.steps;
            record(t + 1, ledger, p_next);
        }

        if (audit != nullptr)
            *audit = local;
        return path;
    }
}
