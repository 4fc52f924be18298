#include "dmvo/wealth_analysis.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/random.hpp"

#include <cmath>

namespace dmvo::wealth_analysis
{
    namespace
    {
        double market_price_of_risk(const MarketParams &m)
        {
            m.validate();
            if (m.n_assets() != 1)
                throw DomainError("wealth analysis is defined for single-asset markets");
            const double sigma = std::abs(m.sigma(0, 0));
            if (!(sigma > 0.0))
                throw DefinitenessError("stock volatility must be positive", 0);
            return (m.mu(0) - m.r) / sigma;
        }
    }

    WealthStats tc_wealth_stats(const MarketParams &m, double W0)
    {
        const double kappa = market_price_of_risk(m);
        const double k2T = kappa * kappa * m.T;
        WealthStats s;
        s.mean = W0 * std::exp(m.r * m.T) + k2T / m.gamma;
        s.variance = k2T / (m.gamma * m.gamma);
        s.value_function = s.mean - 0.5 * m.gamma * s.variance;
        return s;
    }

    DensitySample price_density_sample(const MarketParams &m, double w_T)
    {
        const double kappa = market_price_of_risk(m);
        DensitySample s;
        s.w_T = w_T;
        s.xi_T = std::exp(-m.r * m.T - 0.5 * kappa * kappa * m.T - kappa * w_T);
        return s;
    }

    double precommitment_wealth(const MarketParams &m, double W0, const DensitySample &s)
    {
        const double kappa = market_price_of_risk(m);
        const double growth = std::exp(m.r * m.T);
        const double k2T = kappa * kappa * m.T;
        // xi_T e^{rT} written out so the kappa = 0 case cancels exactly.
        const double deflator = std::exp(-0.5 * k2T - kappa * s.w_T);
        return W0 * growth + (std::exp(k2T) - deflator) / m.gamma;
    }

    double tc_terminal_wealth_sample(const MarketParams &m, double W0, double w_T)
    {
        const double kappa = market_price_of_risk(m);
        return W0 * std::exp(m.r * m.T) + (kappa * kappa * m.T - kappa * w_T) / m.gamma;
    }

    double precommitment_gap(const MarketParams &m)
    {
        const double kappa = market_price_of_risk(m);
        const double x = kappa * kappa * m.T;
        // e^x - 1 - x without cancellation for small x.
        return (std::expm1(x) - x) / m.gamma;
    }

    std::vector<double> brownian_terminal_draws(double T, std::size_t n, std::uint64_t seed)
    {
        std::vector<double> w(n);
        const double scale = std::sqrt(T);
        NormalStream rng(substream_seed(seed, 0));
        for (auto &x : w)
            x = scale * rng();
        return w;
    }

    Comparison compare_strategies_mc(const MarketParams &m, double W0, std::size_t paths, std::uint64_t seed)
    {
        if (paths < 10000)
            throw DomainError("strategy comparison needs at least 10^4 paths");

        const auto draws = brownian_terminal_draws(m.T, paths, seed);
        const double n = static_cast<double>(paths);

        std::vector<double> pre(paths);
        std::vector<double> tc(paths);
        for (std::size_t i = 0; i < paths; ++i)
        {
            pre[i] = precommitment_wealth(m, W0, price_density_sample(m, draws[i]));
            tc[i] = tc_terminal_wealth_sample(m, W0, draws[i]);
        }

        auto mean_se = [n](const std::vector<double> &x, double &mean, double &se) {
            double s = 0.0;
            for (double v : x)
                s += v;
            mean = s / n;
            double ss = 0.0;
            for (double v : x)
                ss += (v - mean) * (v - mean);
            se = std::sqrt(ss / (n - 1.0) / n);
        };

        std::vector<double> diff(paths);
        for (std::size_t i = 0; i < paths; ++i)
            diff[i] = pre[i] - tc[i];

        Comparison c;
        mean_se(pre, c.mean_pre, c.se_pre);
        mean_se(tc, c.mean_tc, c.se_tc);
        mean_se(diff, c.gap, c.gap_se);
        c.gap_analytic = precommitment_gap(m);
        return c;
    }
}
