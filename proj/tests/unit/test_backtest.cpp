#include "dmvo/backtest.hpp"
#include "dmvo/dynamic_policy.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/simulate.hpp"
#include "dmvo/static_mvo.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dmvo;
using namespace dmvo::backtest;

namespace
{
    PriceSeries constant_prices(std::size_t rows, double price)
    {
        PriceSeries p;
        p.prices = Matrix::Constant(static_cast<Eigen::Index>(rows), 1, price);
        for (std::size_t k = 0; k < rows; ++k)
            p.times.push_back(static_cast<double>(k) / 52.0);
        return p;
    }

    PriceSeries gbm_market(std::size_t n_assets, std::size_t weeks, std::uint64_t seed)
    {
        Matrix corr = Matrix::Constant(static_cast<Eigen::Index>(n_assets), static_cast<Eigen::Index>(n_assets), 0.05);
        corr.diagonal().setOnes();
        const auto m = MarketParams::from_covariance(Vector::Constant(static_cast<Eigen::Index>(n_assets), 0.125),
                                                     0.2 * corr, 0.025, 10.0, 1.0);
        simulate::SimConfig cfg;
        cfg.n_assets = n_assets;
        cfg.n_steps = weeks;
        cfg.s0 = Vector::Constant(static_cast<Eigen::Index>(n_assets), 100.0);
        cfg.seed = seed;
        return simulate::gbm_paths(m, cfg);
    }

    BacktestConfig config(const std::string &name, double target = 0.15, double alpha = 0.0)
    {
        BacktestConfig cfg;
        cfg.strategy = Strategy::parse(name, target, alpha);
        return cfg;
    }
}

TEST_CASE("rebalance step")
{
    Ledger l;
    l.wealth = 3.0;
    l.shares = Vector::Constant(1, 9.0);
    const auto zero = rebalance_step(l, Vector::Constant(1, 2.0), Vector::Zero(1));
    CHECK(zero.shares(0) == 0.0);
    CHECK(zero.bond_cash == 3.0);
    CHECK(zero.wealth == 3.0);

    Ledger empty;
    empty.shares = Vector::Zero(1);
    const auto ten = rebalance_step(empty, Vector::Constant(1, 5.0), Vector::Constant(1, 10.0));
    CHECK(ten.shares(0) == 2.0);
    CHECK(ten.bond_cash == -10.0);
    CHECK(ten.wealth == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> price(1.0, 200.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        Ledger a;
        a.wealth = z(rng);
        a.shares = Vector::Zero(4);
        Vector p(4);
        Vector theta(4);
        for (int i = 0; i < 4; ++i)
        {
            p(i) = price(rng);
            theta(i) = 10.0 * z(rng);
        }
        const auto b = rebalance_step(a, p, theta);
        CHECK(std::abs(b.bond_cash + b.stock_value(p) - a.wealth) <= 1e-12 * std::max(1.0, theta.cwiseAbs().sum()));
    }

    CHECK_THROWS_AS(rebalance_step(empty, Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)), DomainError);
}

TEST_CASE("accrue step")
{
    Ledger empty;
    empty.shares = Vector::Zero(1);
    CHECK(accrue_step(empty, Vector::Constant(1, 5.0), 1.0 / 52.0, 0.025).wealth == 0.0);

    const double theta = 7.0;
    const auto held = rebalance_step(empty, Vector::Constant(1, 4.0), Vector::Constant(1, theta));
    const auto next = accrue_step(held, Vector::Constant(1, 4.0), 1.0 / 52.0, 0.025);
    CHECK(next.wealth == doctest::Approx(-theta * std::expm1(0.025 / 52.0)).epsilon(1e-12));

    Ledger stocks;
    stocks.shares = Vector::Constant(1, 3.0);
    stocks.wealth = 30.0;
    const auto up = accrue_step(stocks, Vector::Constant(1, 11.0), 1.0 / 52.0, 0.025);
    CHECK(up.wealth == doctest::Approx(30.0 * 1.1).epsilon(1e-14));
}

TEST_CASE("strategy names")
{
    for (const char *name : {"static", "simple", "multi", "cev", "cev-multi"})
        CHECK(Strategy::parse(name).name() == name);
    CHECK_THROWS_AS(Strategy::parse("momentum"), DomainError);
}

TEST_CASE("constant single-asset price with the simple strategy")
{
    const std::size_t rows = 60;
    const auto prices = constant_prices(rows, 20.0);
    auto cfg = config("simple");
    LedgerAudit audit;
    const auto path = run_backtest(prices, cfg, &audit);

    // Zero-variance batch gets the 1e-6 ridge; mu_hat = 0.
    const double horizon = static_cast<double>(rows - 1) / 52.0;
    const double growth = std::exp(0.025 / 52.0);
    double w = 0.0;
    REQUIRE(path.size() == rows - 26);
    CHECK(path.week_index.front() == 26);
    CHECK(path.wealth.front() == 0.0);
    for (std::size_t t = 26; t + 1 < rows; ++t)
    {
        const double remaining = horizon - static_cast<double>(t) / 52.0;
        const double theta = -0.025 / 1e-6 * std::exp(-0.025 * remaining);
        w = w * growth - theta * (growth - 1.0);
        const double got = path.wealth[t - 26 + 1];
        CHECK(got > 0.0);
        CHECK(std::abs(got - w) <= 1e-12 * std::abs(w));
    }
    CHECK(audit.steps == rows - 27);
    CHECK(audit.max_rebalance_jump <= 1e-9);
    CHECK(audit.max_identity_residual <= 1e-9);
}

TEST_CASE("zero policy keeps wealth at zero")
{
    // r = 0 and flat prices: every dynamic strategy holds nothing.
    auto cfg = config("multi");
    cfg.r = 0.0;
    const auto path = run_backtest(constant_prices(40, 3.0), cfg);
    for (double w : path.wealth)
        CHECK(w == 0.0);
    for (double b : path.bond)
        CHECK(b == 0.0);
}

TEST_CASE("backtests on a simulated market keep the ledger exact")
{
    const auto prices = gbm_market(5, 120, 17);
    for (const char *name : {"static", "simple", "multi", "cev", "cev-multi"})
    {
        LedgerAudit audit;
        const auto cfg = config(name, 0.15, 0.5);
        const auto path = run_backtest(prices, cfg, &audit);
        CHECK(path.size() == 121 - 26);
        CHECK(path.wealth.front() == 0.0);
        CHECK(audit.max_rebalance_jump <= 1e-9);
        CHECK(audit.max_identity_residual <= 1e-9);
        for (std::size_t k = 0; k < path.size(); ++k)
        {
            const double gross = std::max(1.0, std::abs(path.bond[k]) + std::abs(path.stock_value[k]));
            CHECK(std::abs(path.wealth[k] - path.bond[k] - path.stock_value[k]) <= 1e-9 * gross);
        }

        const auto again = run_backtest(prices, cfg);
        CHECK(again.wealth == path.wealth);
        CHECK(again.bond == path.bond);
    }
}

TEST_CASE("strategy money")
{
    const auto prices = gbm_market(3, 60, 2);
    const auto returns = estimate::to_returns(prices);
    const double horizon = 60.0 / 52.0;

    SUBCASE("static weights scale with the notional")
    {
        auto cfg = config("static", 0.2);
        cfg.notional = 1.0;
        const Vector one = strategy_money(prices, returns, 40, cfg, horizon);
        cfg.notional = 250.0;
        const Vector many = strategy_money(prices, returns, 40, cfg, horizon);
        CHECK(one.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK((many - 250.0 * one).cwiseAbs().maxCoeff() <= 1e-9);
    }

    SUBCASE("cev with alpha = 0 equals simple")
    {
        const Vector simple = strategy_money(prices, returns, 40, config("simple"), horizon);
        const Vector cev = strategy_money(prices, returns, 40, config("cev", 0.15, 0.0), horizon);
        CHECK((simple - cev).cwiseAbs().maxCoeff() <= 1e-9 * simple.cwiseAbs().maxCoeff());
        const Vector multi = strategy_money(prices, returns, 40, config("multi"), horizon);
        const Vector cev_multi = strategy_money(prices, returns, 40, config("cev-multi", 0.15, 0.0), horizon);
        CHECK((multi - cev_multi).cwiseAbs().maxCoeff() <= 1e-9 * multi.cwiseAbs().maxCoeff());
    }

    SUBCASE("no look-ahead")
    {
        auto later = prices;
        later.prices.bottomRows(60 - 40) *= 1.7;
        const auto cfg = config("multi");
        const Vector a = strategy_money(prices, returns, 40, cfg, horizon);
        const Vector b = strategy_money(later, estimate::to_returns(later), 40, cfg, horizon);
        CHECK(a == b);
    }
}

TEST_CASE("backtest argument checks")
{
    CHECK_THROWS_AS(run_backtest(constant_prices(27, 1.0), config("simple")), WarmupError);
    auto cfg = config("simple");
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(run_backtest(constant_prices(40, 1.0), cfg), DomainError);
}
