#include "dmvo/metrics.hpp"
#include "dmvo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace dmvo::metrics
{
    namespace
    {
        /// Running-peak drawdown; only the running peak has to stay positive.
        double peak_drawdown(std::span<const double> series)
        {
            double peak = series.front();
            double worst = 0.0;
            for (double v : series)
            {
                peak = std::max(peak, v);
                worst = std::min(worst, (v - peak) / peak);
            }
            return worst;
        }
    }

    double max_drawdown(std::span<const double> series)
    {
        if (series.empty())
            throw DomainError("drawdown of an empty series");

        for (std::size_t k = 0; k < series.size(); ++k)
        {
            const double v = series[k];
            if (!(v > 0.0))
            {
                std::ostringstream msg;
                msg << "drawdown needs a positive series; entry " << k << " = " << v
                    << " (shift the wealth path by a base first)";
                throw DomainError(msg.str());
            }
        }
        return peak_drawdown(series);
    }

    PerfStats perf_stats(std::span<const double> wealth, double base)
    {
        if (!(base > 0.0))
            throw DomainError("performance base must be positive");
        if (wealth.empty())
            throw DomainError("performance statistics of an empty wealth path");

        std::vector<double> equity(wealth.size());
        std::transform(wealth.begin(), wealth.end(), equity.begin(), [base](double w) { return base + w; });

        if (!(equity.front() > 0.0))
            throw DomainError("initial equity base + wealth[0] must be positive");

        PerfStats s;
        s.max_drawdown = peak_drawdown(equity);
        s.terminal_return = equity.back() / equity.front() - 1.0;

        const std::size_t n = wealth.size() - 1;
        if (n >= 2)
        {
            double mean = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                mean += wealth[k + 1] - wealth[k];
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t k = 0; k < n; ++k)
            {
                const double d = (wealth[k + 1] - wealth[k]) - mean;
                ss += d * d;
            }
            s.std_dev = std::sqrt(kWeeksPerYear * ss / static_cast<double>(n - 1)) / equity.front();
        }
        return s;
    }
}
