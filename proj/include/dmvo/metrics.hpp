#pragma once

#include "dmvo/types.hpp"

#include <span>

namespace dmvo::metrics
{
    /// Table-style summary of an equity curve E_k = base + wealth_k.
    struct PerfStats
    {
        double terminal_return = 0.0; ///< E_end / E_0 - 1
        double max_drawdown = 0.0;    ///< <= 0, peak-relative; below -1 if equity turns negative
        double std_dev = 0.0;         ///< sqrt(52) * sd(weekly wealth increments) / E_0
    };

    inline constexpr double kWeeksPerYear = 52.0;

    /// Running-peak drawdown, O(n). Entries must be positive.
    double max_drawdown(std::span<const double> series);

    PerfStats perf_stats(std::span<const double> wealth, double base);

    inline PerfStats perf_stats(const WealthPath &path, double base)
    {
        return perf_stats(std::span<const double>(path.wealth), base);
    }
}
