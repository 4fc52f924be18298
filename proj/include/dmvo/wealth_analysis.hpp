/**
 * @file wealth_analysis.hpp
 * @brief Terminal-wealth statistics of the time-consistent strategy and the
 *        precommitment benchmark in a single-asset market with constant
 *        market price of risk kappa = (mu - r)/sigma.
 *
 * Time-consistent:  W*_T = W0 e^{rT} + kappa^2 T/gamma - (kappa/gamma) w_T
 * Precommitment:    W^_T = W0 e^{rT} + (1/gamma) e^{kappa^2 T} - (1/gamma) xi_T e^{rT}
 * State-price density xi_T = exp(-rT - kappa^2 T/2 - kappa w_T), xi_0 = 1.
 */
#pragma once

#include "dmvo/types.hpp"

#include <cstdint>

namespace dmvo::wealth_analysis
{
    struct WealthStats
    {
        double mean = 0.0;
        double variance = 0.0;
        double value_function = 0.0;
    };

    struct DensitySample
    {
        double xi_T = 1.0;
        double w_T = 0.0;
    };

    WealthStats tc_wealth_stats(const MarketParams &m, double W0);

    DensitySample price_density_sample(const MarketParams &m, double w_T);

    double precommitment_wealth(const MarketParams &m, double W0, const DensitySample &s);

    double tc_terminal_wealth_sample(const MarketParams &m, double W0, double w_T);

    struct Comparison
    {
        double mean_pre = 0.0;
        double mean_tc = 0.0;
        double se_pre = 0.0;
        double se_tc = 0.0;
        double gap = 0.0;    ///< mean of per-draw differences W^_T - W*_T
        double gap_se = 0.0;
        double gap_analytic = 0.0;
    };

    /// (1/gamma)(e^{kappa^2 T} - 1 - kappa^2 T), the expected precommitment advantage.
    double precommitment_gap(const MarketParams &m);

    /// Both wealths on the same w_T draws. Requires paths >= 10^4.
    Comparison compare_strategies_mc(const MarketParams &m, double W0, std::size_t paths, std::uint64_t seed);

    /// Standard-normal draws scaled to w_T ~ N(0, T), substream per draw.
    std::vector<double> brownian_terminal_draws(double T, std::size_t n, std::uint64_t seed);
}
