#include "dmvo/csv_io.hpp"
#include "dmvo/errors.hpp"

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dmvo::csv_io
{
    namespace
    {
        std::vector<std::string> split(const std::string &line)
        {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ss(line);
            while (std::getline(ss, cell, ','))
                cells.push_back(cell);
            if (!line.empty() && line.back() == ',')
                cells.emplace_back();
            return cells;
        }

        std::string trim(std::string s)
        {
            const auto first = s.find_first_not_of(" \t\r\n");
            if (first == std::string::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r\n");
            return s.substr(first, last - first + 1);
        }

        double parse_number(const std::string &text, std::size_t line, std::size_t column)
        {
            const std::string t = trim(text);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
            if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            {
                std::ostringstream msg;
                msg << "line " << line << ", column " << column << ": cannot parse number '" << t << "'";
                throw DataError(msg.str(), line);
            }
            return value;
        }

        std::chrono::sys_days parse_date(const std::string &text, std::size_t line)
        {
            int y = 0;
            unsigned m = 0;
            unsigned d = 0;
            char dash1 = 0;
            char dash2 = 0;
            std::istringstream ss(trim(text));
            ss >> y >> dash1 >> m >> dash2 >> d;
            const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
            if (!ss || dash1 != '-' || dash2 != '-' || !ss.eof() || !ymd.ok())
            {
                std::ostringstream msg;
                msg << "line " << line << ": invalid ISO-8601 date '" << trim(text) << "'";
                throw DataError(msg.str(), line);
            }
            return std::chrono::sys_days{ymd};
        }

        std::string format_date(std::chrono::sys_days day)
        {
            const std::chrono::year_month_day ymd{day};
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            return buf;
        }

        std::ifstream open_in(const std::string &file)
        {
            std::ifstream in(file);
            if (!in)
                throw DataError("cannot open '" + file + "' for reading");
            return in;
        }

        std::ofstream open_out(const std::string &file)
        {
            std::ofstream out(file);
            if (!out)
                throw DataError("cannot open '" + file + "' for writing");
            return out;
        }
    }

    std::vector<std::string> weekly_dates(const std::string &start, std::size_t n)
    {
        const auto first = parse_date(start, 0);
        std::vector<std::string> out;
        out.reserve(n);
        for (std::size_t k = 0; k < n; ++k)
            out.push_back(format_date(first + std::chrono::days{7 * static_cast<long>(k)}));
        return out;
    }

    std::string format_number(double x)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%#.17g", x);
        return buf;
    }

    void write_prices(std::ostream &out, const PriceSeries &series)
    {
        const std::size_t rows = series.n_rows();
        const std::size_t cols = series.n_assets();
        const auto dates = series.dates.size() == rows ? series.dates : weekly_dates(kDefaultStartDate, rows);

        out << "date";
        for (std::size_t i = 0; i < cols; ++i)
            out << ',' << (i < series.tickers.size() ? series.tickers[i] : "S" + std::to_string(i + 1));
        out << '\n';
        for (std::size_t k = 0; k < rows; ++k)
        {
            out << dates[k];
            for (std::size_t i = 0; i < cols; ++i)
                out << ',' << format_number(series.prices(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)));
            out << '\n';
        }
    }

    PriceSeries read_prices(std::istream &in, double dt)
    {
        std::string line;
        std::size_t line_no = 0;
        PriceSeries out;

        while (std::getline(in, line))
        {
            ++line_no;
            if (!trim(line).empty())
                break;
        }
        if (line_no == 0 || trim(line).empty())
            throw DataError("line " + std::to_string(line_no + 1) + ": empty price file", line_no + 1);
        const auto header = split(line);
        if (header.size() < 2 || trim(header[0]) != "date")
            throw DataError("line " + std::to_string(line_no) + ": header must be 'date,<ticker1>,...'", line_no);
        for (std::size_t i = 1; i < header.size(); ++i)
            out.tickers.push_back(trim(header[i]));
        const std::size_t cols = out.tickers.size();

        std::vector<double> values;
        std::chrono::sys_days previous{};
        while (std::getline(in, line))
        {
            ++line_no;
            if (trim(line).empty())
                continue;
            const auto cells = split(line);
            if (cells.size() != cols + 1)
            {
                std::ostringstream msg;
                msg << "line " << line_no << ": expected " << (cols + 1) << " fields, got " << cells.size();
                throw DataError(msg.str(), line_no);
            }
            const auto day = parse_date(cells[0], line_no);
            if (!out.dates.empty() && day <= previous)
                throw DataError("line " + std::to_string(line_no) + ": dates must be strictly increasing", line_no);
            previous = day;
            out.dates.push_back(trim(cells[0]));
            for (std::size_t i = 0; i < cols; ++i)
            {
                const double v = parse_number(cells[i + 1], line_no, i + 2);
                if (!(v > 0.0) || !std::isfinite(v))
                {
                    std::ostringstream msg;
                    msg << "line " << line_no << ", column " << (i + 2) << ": price must be positive and finite";
                    throw DataError(msg.str(), line_no);
                }
                values.push_back(v);
            }
        }

        const std::size_t rows = out.dates.size();
        if (rows == 0)
            throw DataError("price file has no data rows", line_no);
        out.prices = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        out.times.resize(rows);
        for (std::size_t k = 0; k < rows; ++k)
            out.times[k] = static_cast<double>(k) * dt;
        return out;
    }

    void write_wealth(std::ostream &out, const WealthPath &path)
    {
        out << "week_index,time_years,wealth,bond,stock_value\n";
        for (std::size_t k = 0; k < path.size(); ++k)
        {
            out << path.week_index[k] << ',' << format_number(path.times[k]) << ','
                << format_number(path.wealth[k]) << ',' << format_number(path.bond[k]) << ','
                << format_number(path.stock_value[k]) << '\n';
        }
    }

    WealthPath read_wealth(std::istream &in)
    {
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line))
            throw DataError("wealth file is empty", 0);
        ++line_no;
        if (trim(line) != "week_index,time_years,wealth,bond,stock_value")
            throw DataError("line 1: unexpected wealth header", 1);

        WealthPath path;
        while (std::getline(in, line))
        {
            ++line_no;
            if (trim(line).empty())
                continue;
            const auto cells = split(line);
            if (cells.size() != 5)
                throw DataError("line " + std::to_string(line_no) + ": expected 5 fields", line_no);
            path.week_index.push_back(static_cast<std::size_t>(parse_number(cells[0], line_no, 1)));
            path.times.push_back(parse_number(cells[1], line_no, 2));
            path.wealth.push_back(parse_number(cells[2], line_no, 3));
            path.bond.push_back(parse_number(cells[3], line_no, 4));
            path.stock_value.push_back(parse_number(cells[4], line_no, 5));
        }
        return path;
    }

    PriceSeries load_prices(const std::string &file, double dt)
    {
        auto in = open_in(file);
        return read_prices(in, dt);
    }

    void save_prices(const std::string &file, const PriceSeries &series)
    {
        auto out = open_out(file);
        write_prices(out, series);
    }

    WealthPath load_wealth(const std::string &file)
    {
        auto in = open_in(file);
        return read_wealth(in);
    }

    void save_wealth(const std::string &file, const WealthPath &path)
    {
        auto out = open_out(file);
        write_wealth(out, path);
    }
}
