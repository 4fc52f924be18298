/**
 * @file csv_io.hpp
 * @brief Price-panel and wealth-path CSV formats.
 *
 * Prices:  date,<ticker1>,...,<tickerN>   one row per week, ISO-8601 dates,
 *          values printed with 17 significant digits so they round-trip.
 * Wealth:  week_index,time_years,wealth,bond,stock_value
 */
#pragma once

#include "dmvo/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dmvo::csv_io
{
    /// Default first row date for simulated panels.
    inline constexpr const char *kDefaultStartDate = "2008-01-07";

    /// n consecutive weekly ISO dates starting at `start` (YYYY-MM-DD).
    std::vector<std::string> weekly_dates(const std::string &start, std::size_t n);

    /// Lossless decimal rendering used by every writer.
    std::string format_number(double x);

    void write_prices(std::ostream &out, const PriceSeries &series);

    /// Parses a price panel; times are row_index * dt. Errors carry the 1-based line number.
    PriceSeries read_prices(std::istream &in, double dt = 1.0 / 52.0);

    void write_wealth(std::ostream &out, const WealthPath &path);

    WealthPath read_wealth(std::istream &in);

    PriceSeries load_prices(const std::string &file, double dt = 1.0 / 52.0);
    void save_prices(const std::string &file, const PriceSeries &series);
    WealthPath load_wealth(const std::string &file);
    void save_wealth(const std::string &file, const WealthPath &path);
}
