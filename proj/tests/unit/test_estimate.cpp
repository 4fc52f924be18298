#include "dmvo/errors.hpp"
#include "dmvo/estimate.hpp"
#include "dmvo/random.hpp"
#include "dmvo/simulate.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace dmvo;
using namespace dmvo::estimate;

namespace
{
    PriceSeries series(const Matrix &prices)
    {
        PriceSeries p;
        p.prices = prices;
        for (Eigen::Index k = 0; k < prices.rows(); ++k)
            p.times.push_back(static_cast<double>(k) / 52.0);
        return p;
    }

    PriceSeries gbm(const MarketParams &m, std::size_t steps, std::uint64_t seed)
    {
        simulate::SimConfig cfg;
        cfg.n_assets = m.n_assets();
        cfg.n_steps = steps;
        cfg.s0 = Vector::Constant(static_cast<Eigen::Index>(m.n_assets()), 100.0);
        cfg.seed = seed;
        return simulate::gbm_paths(m, cfg);
    }
}

TEST_CASE("returns")
{
    const auto flat = to_returns(series(Matrix::Constant(5, 2, 7.0)));
    CHECK(flat.n_obs() == 4);
    CHECK(flat.returns.cwiseAbs().maxCoeff() == 0.0);
    CHECK(flat.times.front() == doctest::Approx(1.0 / 52.0));

    Matrix p(2, 1);
    p << 3.0, 6.0;
    CHECK(to_returns(series(p)).returns(0, 0) == 1.0);

    Matrix bad(3, 2);
    bad << 1.0, 1.0, 1.0, 0.0, 1.0, 1.0;
    try
    {
        to_returns(series(bad));
        FAIL("expected a data error");
    }
    catch (const DataError &e)
    {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
    CHECK_THROWS_AS(to_returns(series(Matrix::Ones(1, 2))), DataError);
}

TEST_CASE("weekly returns of a GBM series")
{
    const auto m = MarketParams::single(0.125, 0.2, 0.025, 200.0, 1.0);
    const auto r = to_returns(gbm(m, 10000, 3));
    std::vector<double> x(r.returns.col(0).data(), r.returns.col(0).data() + r.n_obs());
    const auto s = test::mean_se(x);
    // Simple weekly return has mean e^{mu dt} - 1.
    CHECK(test::within_se(s.mean, std::expm1(0.125 / 52.0), s.se));
    CHECK(test::within_se(s.mean, 0.125 / 52.0, s.se));
}

TEST_CASE("rolling estimate")
{
    SUBCASE("constant returns")
    {
        Matrix p(40, 2);
        for (int k = 0; k < 40; ++k)
        {
            p(k, 0) = std::pow(1.01, k);
            p(k, 1) = 5.0 * std::pow(0.99, k);
        }
        const auto est = rolling_estimate(to_returns(series(p)), 30);
        CHECK(est.mu_hat(0) == doctest::Approx(0.52).epsilon(1e-12));
        CHECK(est.mu_hat(1) == doctest::Approx(-0.52).epsilon(1e-12));
        CHECK(est.sigma_hat.cwiseAbs().maxCoeff() <= 1e-24);
        CHECK(est.batch_start == 4);
        CHECK(est.batch_end == 30);
    }

    SUBCASE("warm-up")
    {
        const auto r = to_returns(series(Matrix::Constant(40, 1, 1.0)));
        CHECK_THROWS_AS(rolling_estimate(r, 25), WarmupError);
        CHECK_NOTHROW(rolling_estimate(r, 26));
        CHECK_THROWS_AS(rolling_estimate(r, 40), DomainError);
    }

    const auto m = MarketParams::from_covariance(Vector::Constant(3, 0.1), 0.04 * Matrix::Identity(3, 3), 0.02, 10.0, 1.0);
    const auto prices = gbm(m, 200, 5);
    const auto r = to_returns(prices);

    SUBCASE("consecutive batches overlap in all but one observation")
    {
        const auto a = rolling_estimate(r, 60);
        const auto b = rolling_estimate(r, 61);
        CHECK(b.batch_start == a.batch_start + 1);
        CHECK(a.batch_end - a.batch_start == 26);
        CHECK(a.batch_end - b.batch_start == 25);
    }

    SUBCASE("scale equivariance")
    {
        auto scaled = prices;
        scaled.prices *= 37.5;
        const auto a = rolling_estimate(r, 100);
        const auto b = rolling_estimate(to_returns(scaled), 100);
        CHECK((a.mu_hat - b.mu_hat).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((a.sigma_hat - b.sigma_hat).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("no look-ahead")
    {
        auto changed = prices;
        changed.prices.bottomRows(prices.prices.rows() - 101) *= 3.0;
        const auto a = rolling_estimate(r, 100);
        const auto b = rolling_estimate(to_returns(changed), 100);
        CHECK(a.mu_hat == b.mu_hat);
        CHECK(a.sigma_hat == b.sigma_hat);
    }

    SUBCASE("perfectly correlated assets")
    {
        Matrix p(prices.prices.rows(), 2);
        p.col(0) = prices.prices.col(0);
        p.col(1) = 2.0 * prices.prices.col(0);
        const auto est = rolling_estimate(to_returns(series(p)), 80);
        const double rho = est.sigma_hat(0, 1) / std::sqrt(est.sigma_hat(0, 0) * est.sigma_hat(1, 1));
        CHECK(std::abs(rho - 1.0) <= 1e-10);
    }

    SUBCASE("sample covariance is symmetric")
    {
        const auto est = rolling_estimate(r, 150);
        CHECK(est.sigma_hat == est.sigma_hat.transpose());
    }
}

TEST_CASE("rolling estimate is unbiased for the simple-return mean")
{
    const auto m = MarketParams::single(0.125, 0.2, 0.025, 10.0, 1.0);
    std::vector<double> mu_hat(200);
    for (std::size_t b = 0; b < mu_hat.size(); ++b)
        mu_hat[b] = rolling_estimate(to_returns(gbm(m, 26, substream_seed(44, b))), 26).mu_hat(0);
    const auto s = test::mean_se(mu_hat);
    CHECK(test::within_se(s.mean, 52.0 * std::expm1(0.125 / 52.0), s.se));
    CHECK(test::within_se(s.mean, 0.125, s.se));
}

TEST_CASE("covariance regularization")
{
    Matrix pd(2, 2);
    pd << 2.0, 0.5, 0.5, 1.0;
    CHECK(!is_singular(pd));
    CHECK(regularize_covariance(pd) == pd);

    Matrix rank_one = Matrix::Ones(3, 3);
    CHECK(is_singular(rank_one));
    const Matrix ridged = regularize_covariance(rank_one);
    CHECK(ridged == rank_one + 1e-6 * Matrix::Identity(3, 3));
    CHECK(!is_singular(ridged));

    CHECK(regularize_covariance(Matrix::Zero(2, 2)) == 1e-6 * Matrix::Identity(2, 2));

    // 50 assets on 26 observations is rank deficient.
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    Matrix obs(26, 50);
    for (Eigen::Index i = 0; i < obs.size(); ++i)
        obs.data()[i] = 0.02 * z(rng);
    const Matrix cov = sample_covariance(obs);
    CHECK(is_singular(cov));
    CHECK(!is_singular(regularize_covariance(cov)));
}
