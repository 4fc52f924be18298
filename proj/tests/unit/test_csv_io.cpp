#include "dmvo/csv_io.hpp"
#include "dmvo/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace dmvo;
using namespace dmvo::csv_io;

namespace
{
    std::size_t data_error_line(const std::string &text)
    {
        std::istringstream in(text);
        try
        {
            read_prices(in);
        }
        catch (const DataError &e)
        {
            return e.line();
        }
        return 0;
    }
}

TEST_CASE("weekly dates")
{
    const auto d = weekly_dates("2008-01-07", 3);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == "2008-01-07");
    CHECK(d[1] == "2008-01-14");
    CHECK(d[2] == "2008-01-21");
    CHECK(weekly_dates("2008-02-25", 2)[1] == "2008-03-03");
    CHECK(weekly_dates("2019-12-30", 2)[1] == "2020-01-06");
    CHECK_THROWS_AS(weekly_dates("2008-13-01", 2), DataError);
    CHECK_THROWS_AS(weekly_dates("not a date", 2), DataError);
}

TEST_CASE("numbers round-trip")
{
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -123456.789, 100.0 * std::exp(0.3)})
        CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("price panel round-trip")
{
    PriceSeries p;
    p.tickers = {"A", "B"};
    p.dates = weekly_dates(kDefaultStartDate, 3);
    p.prices.resize(3, 2);
    p.prices << 100.0, 50.0, 100.0 / 3.0, 51.5, 0.1, 1e6;
    for (int k = 0; k < 3; ++k)
        p.times.push_back(k / 52.0);

    std::stringstream s;
    write_prices(s, p);
    CHECK(s.str().rfind("date,A,B\n2008-01-07,", 0) == 0);
    const auto q = read_prices(s);
    CHECK(q.prices == p.prices);
    CHECK(q.tickers == p.tickers);
    CHECK(q.dates == p.dates);
    REQUIRE(q.times.size() == 3);
    CHECK(q.times[2] == 2.0 / 52.0);
}

TEST_CASE("price parse errors carry line numbers")
{
    CHECK(data_error_line("") == 1);
    CHECK(data_error_line("time,A\n2008-01-07,1\n") == 1);
    CHECK(data_error_line("date,A\n2008-01-07,1\n2008-01-14,abc\n") == 3);
    CHECK(data_error_line("date,A,B\n2008-01-07,1\n") == 2);
    CHECK(data_error_line("date,A\n2008-01-14,1\n2008-01-07,1\n") == 3);
    CHECK(data_error_line("date,A\n2008-01-07,1\n2008-01-14,-2\n") == 3);
}

TEST_CASE("wealth path round-trip")
{
    WealthPath w;
    w.week_index = {26, 27, 28};
    w.times = {0.5, 27.0 / 52.0, 28.0 / 52.0};
    w.wealth = {0.0, 0.012345678901234567, -0.3};
    w.bond = {0.0, -1.0 / 7.0, 2.5};
    w.stock_value = {0.0, 1.0 / 7.0 + 0.012345678901234567, -2.8};

    std::stringstream s;
    write_wealth(s, w);
    CHECK(s.str().rfind("week_index,time_years,wealth,bond,stock_value\n", 0) == 0);
    const auto r = read_wealth(s);
    CHECK(r.week_index == w.week_index);
    CHECK(r.times == w.times);
    CHECK(r.wealth == w.wealth);
    CHECK(r.bond == w.bond);
    CHECK(r.stock_value == w.stock_value);

    std::istringstream bad("week_index,time_years,wealth,bond,stock_value\n1,0.1,0.2\n");
    CHECK_THROWS_AS(read_wealth(bad), DataError);
}

TEST_CASE("missing files")
{
    CHECK_THROWS_AS(load_prices("/nonexistent/dir/prices.csv"), DataError);
    CHECK_THROWS_AS(load_wealth("/nonexistent/dir/wealth.csv"), DataError);
}
