/**
 * @file dmvo_cli.cpp
 * @brief Command-line front-end: simulate | backtest | mvo | policy | compare-precommit | report.
 *
 * Exit codes: 0 success, 2 usage, 3 data, 4 numerical.
 * Every command writes manifest.json next to its outputs.
 */
#include "dmvo/backtest.hpp"
#include "dmvo/csv_io.hpp"
#include "dmvo/dynamic_policy.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/estimate.hpp"
#include "dmvo/metrics.hpp"
#include "dmvo/parallel.hpp"
#include "dmvo/simulate.hpp"
#include "dmvo/static_mvo.hpp"
#include "dmvo/wealth_analysis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef DMVO_VERSION
#define DMVO_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dmvo;

namespace
{
    constexpr int kExitUsage = 2;
    constexpr int kExitData = 3;
    constexpr int kExitNumerical = 4;

    /// Bad flag combination detected after parsing.
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    std::string trim(const std::string &s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    /**
     * Appends `--key value` for every entry of a key=value config file whose
     * flag is absent from argv, so command-line flags win.
     */
    std::vector<std::string> merge_config(const std::vector<std::string> &args)
    {
        std::vector<std::string> out;
        std::string config;
        for (std::size_t i = 0; i < args.size(); ++i)
        {
            const std::string &a = args[i];
            if (a == "--config")
            {
                if (i + 1 >= args.size())
                    throw UsageError("--config needs a file name");
                config = args[++i];
            }
            else if (a.rfind("--config=", 0) == 0)
            {
                config = a.substr(9);
            }
            else
            {
                out.push_back(a);
            }
        }
        if (config.empty())
            return out;

        std::set<std::string> given;
        for (const auto &a : out)
            if (a.rfind("--", 0) == 0)
                given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));

        std::ifstream in(config);
        if (!in)
            throw DataError("cannot open config file '" + config + "'");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const std::string t = trim(line.substr(0, line.find('#')));
            if (t.empty())
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw DataError(config + ": line " + std::to_string(line_no) + ": expected key=value", line_no);
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw DataError(config + ": line " + std::to_string(line_no) + ": empty key", line_no);
            if (given.count(key))
                continue;
            out.push_back("--" + key);
            out.push_back(value);
        }
        return out;
    }

    /// Flag value, else DMVO_OUTPUT_DIR, else ./dmvo_out.
    fs::path output_dir(const std::string &flag)
    {
        if (!flag.empty())
            return flag;
        if (const char *env = std::getenv("DMVO_OUTPUT_DIR"); env != nullptr && *env != '\0')
            return env;
        return "dmvo_out";
    }

    fs::path prepare_dir(const std::string &flag)
    {
        const fs::path dir = output_dir(flag);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
        return dir;
    }

    void write_json(const fs::path &file, const json &j)
    {
        std::ofstream out(file);
        if (!out)
            throw DataError("cannot write '" + file.string() + "'");
        out << j.dump(2) << '\n';
        if (!out)
            throw DataError("write failed for '" + file.string() + "'");
    }

    json to_json(const Vector &v)
    {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.push_back(v(i));
        return a;
    }

    Vector to_vector(const std::vector<double> &v)
    {
        return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    /// Parses "a,b;c,d" into a row-major matrix.
    Matrix parse_matrix(const std::string &text)
    {
        std::vector<std::vector<double>> rows;
        std::stringstream all(text);
        std::string row;
        while (std::getline(all, row, ';'))
        {
            std::vector<double> values;
            std::stringstream cells(row);
            std::string cell;
            while (std::getline(cells, cell, ','))
            {
                try
                {
                    std::size_t used = 0;
                    const std::string t = trim(cell);
                    values.push_back(std::stod(t, &used));
                    if (used != t.size())
                        throw std::invalid_argument(t);
                }
                catch (const std::exception &)
                {
                    throw UsageError("cannot parse matrix entry '" + cell + "'");
                }
            }
            rows.push_back(values);
        }
        if (rows.empty())
            throw UsageError("empty matrix");
        Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            if (rows[i].size() != rows.front().size())
                throw UsageError("matrix rows have different lengths");
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        return m;
    }

    /// Broadcasts a one-element list to n entries.
    Vector broadcast(const std::vector<double> &v, std::size_t n, const std::string &flag)
    {
        if (v.size() == n)
            return to_vector(v);
        if (v.size() == 1)
            return Vector::Constant(static_cast<Eigen::Index>(n), v.front());
        throw UsageError(flag + " needs 1 or " + std::to_string(n) + " values");
    }

    Matrix constant_correlation(std::size_t n, double rho)
    {
        Matrix c = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rho);
        c.diagonal().setOnes();
        return c;
    }

    std::string target_suffix(double target)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "_target_%.4g", target);
        return buf;
    }

    json stats_json(const metrics::PerfStats &s)
    {
        return {{"terminal_return", s.terminal_return}, {"max_drawdown", s.max_drawdown}, {"std_dev", s.std_dev}};
    }

    /// Shared state of one command invocation.
    struct Run
    {
        std::string name;
        std::vector<std::string> argv;
        std::string out_flag;
        json params = json::object();
        json outputs = json::array();

        void finish(const fs::path &dir) const
        {
            json manifest;
            manifest["command"] = name;
            manifest["version"] = DMVO_VERSION;
            manifest["argv"] = argv;
            manifest["params"] = params;
            manifest["output_dir"] = dir.string();
            manifest["outputs"] = outputs;
            write_json(dir / "manifest.json", manifest);
            std::cout << "wrote " << (dir / "manifest.json").string() << '\n';
        }
    };

    // ---------------------------------------------------------------- simulate

    struct SimulateArgs
    {
        std::string model = "gbm";
        std::size_t assets = 50;
        std::size_t weeks = 523;
        double mu = 0.125;
        double variance = 0.2;
        std::optional<double> sigma;
        double corr = 0.05;
        double s0 = 100.0;
        double alpha = 1.0;
        std::optional<double> sigma_bar;
        double r = 0.025;
        std::string measure = "physical";
        std::uint64_t seed = 0;
        std::string start = csv_io::kDefaultStartDate;
    };

    void cmd_simulate(const SimulateArgs &a, Run &run)
    {
        if (a.model != "gbm" && a.model != "cev")
            throw UsageError("--model must be gbm or cev");
        if (a.measure != "physical" && a.measure != "hedge-neutral")
            throw UsageError("--measure must be physical or hedge-neutral");
        if (a.sigma_bar && a.model != "cev")
            throw UsageError("--sigma-bar applies to --model cev only");
        if (a.sigma && *a.sigma < 0.0)
            throw UsageError("--sigma must be non-negative");

        const double variance = a.sigma ? *a.sigma * *a.sigma : a.variance;
        const std::size_t n = a.assets;
        const Matrix corr = constant_correlation(n, a.corr);
        const double T = static_cast<double>(a.weeks) / 52.0;

        simulate::SimConfig cfg;
        cfg.n_assets = n;
        cfg.n_steps = a.weeks;
        cfg.s0 = Vector::Constant(static_cast<Eigen::Index>(n), a.s0);
        cfg.seed = a.seed;
        cfg.measure = a.measure == "physical" ? simulate::Measure::physical : simulate::Measure::hedge_neutral;

        PriceSeries series;
        double sigma_bar = 0.0;
        if (a.model == "gbm")
        {
            const auto m = MarketParams::from_covariance(Vector::Constant(static_cast<Eigen::Index>(n), a.mu),
                                                         variance * corr, a.r, T, 1.0);
            series = simulate::gbm_paths(m, cfg);
        }
        else
        {
            // Default scale keeps the instantaneous variance sigma_bar^2 S0^alpha at the requested rate.
            sigma_bar = a.sigma_bar ? *a.sigma_bar : std::sqrt(variance / std::pow(a.s0, a.alpha));
            CevParams c;
            c.mu = Vector::Constant(static_cast<Eigen::Index>(n), a.mu);
            c.sigma_bar = Vector::Constant(static_cast<Eigen::Index>(n), sigma_bar);
            c.alpha = Vector::Constant(static_cast<Eigen::Index>(n), a.alpha);
            c.corr = corr;
            c.r = a.r;
            c.T = T;
            c.gamma = 1.0;
            series = simulate::cev_paths(c, cfg);
        }

        series.dates = csv_io::weekly_dates(a.start, a.weeks + 1);
        for (std::size_t i = 0; i < n; ++i)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "S%03zu", i + 1);
            series.tickers.emplace_back(buf);
        }

        const fs::path dir = prepare_dir(run.out_flag);
        csv_io::save_prices((dir / "prices.csv").string(), series);
        run.outputs.push_back("prices.csv");
        run.params = {{"model", a.model}, {"assets", n}, {"weeks", a.weeks}, {"mu", a.mu},
                      {"variance", variance}, {"corr", a.corr}, {"s0", a.s0}, {"r", a.r},
                      {"measure", a.measure}, {"seed", a.seed}, {"start", a.start}};
        if (a.model == "cev")
        {
            run.params["alpha"] = a.alpha;
            run.params["sigma_bar"] = sigma_bar;
        }
        run.finish(dir);
    }

    // ---------------------------------------------------------------- backtest

    struct BacktestArgs
    {
        std::string prices;
        std::string strategy = "simple";
        std::vector<double> targets{0.15};
        double alpha = 0.0;
        double gamma = 1.0;
        double r = 0.025;
        std::size_t batch = estimate::kDefaultBatch;
        double notional = 1.0;
        double base = 1.0;
        std::size_t threads = 1;
    };

    void cmd_backtest(const BacktestArgs &a, Run &run)
    {
        if (a.targets.empty())
            throw UsageError("--target needs at least one value");
        const bool is_static = a.strategy == "static";
        if (!is_static && a.targets.size() > 1)
            throw UsageError("several --target values apply to --strategy static only");
        if (!(a.base > 0.0))
            throw UsageError("--base must be positive");

        const PriceSeries prices = csv_io::load_prices(a.prices);

        std::vector<backtest::BacktestConfig> configs;
        for (double target : a.targets)
        {
            backtest::BacktestConfig cfg;
            cfg.strategy = backtest::Strategy::parse(a.strategy, target, a.alpha);
            cfg.gamma = a.gamma;
            cfg.r = a.r;
            cfg.batch_len = a.batch;
            cfg.notional = a.notional;
            cfg.validate();
            configs.push_back(cfg);
        }

        std::vector<WealthPath> paths(configs.size());
        std::vector<backtest::LedgerAudit> audits(configs.size());
        parallel_for(configs.size(), a.threads, [&](std::size_t i) {
            paths[i] = backtest::run_backtest(prices, configs[i], &audits[i]);
        });

        const fs::path dir = prepare_dir(run.out_flag);
        for (std::size_t i = 0; i < configs.size(); ++i)
        {
            const std::string suffix = configs.size() > 1 ? target_suffix(configs[i].strategy.target) : "";
            const auto stats = metrics::perf_stats(paths[i], a.base);
            json s = stats_json(stats);
            s["strategy"] = configs[i].strategy.name();
            if (is_static)
                s["target"] = configs[i].strategy.target;
            s["base"] = a.base;
            s["terminal_wealth"] = paths[i].wealth.back();
            s["weeks"] = paths[i].size() - 1;
            s["ledger"] = {{"max_rebalance_jump", audits[i].max_rebalance_jump},
                           {"max_identity_residual", audits[i].max_identity_residual}};
            csv_io::save_wealth((dir / ("wealth" + suffix + ".csv")).string(), paths[i]);
            write_json(dir / ("stats" + suffix + ".json"), s);
            run.outputs.push_back("wealth" + suffix + ".csv");
            run.outputs.push_back("stats" + suffix + ".json");
        }

        run.params = {{"prices", fs::absolute(a.prices).string()}, {"strategy", a.strategy}, {"targets", a.targets},
                      {"alpha", a.alpha}, {"gamma", a.gamma}, {"r", a.r}, {"batch", a.batch},
                      {"notional", a.notional}, {"base", a.base}};
        run.finish(dir);
    }

    // ---------------------------------------------------------------- mvo

    struct MvoArgs
    {
        std::string prices;
        std::vector<double> mu;
        std::string cov;
        std::optional<double> target;
    };

    void cmd_mvo(const MvoArgs &a, Run &run)
    {
        if (!a.target)
            throw UsageError("--target is required");
        static_mvo::StaticProblem p;
        p.target = *a.target;
        if (!a.prices.empty())
        {
            if (!a.mu.empty() || !a.cov.empty())
                throw UsageError("use either --prices or --mu/--cov");
            const auto r = estimate::to_returns(csv_io::load_prices(a.prices));
            p.mu = r.returns.colwise().mean().transpose() * estimate::kPeriodsPerYear;
            p.Sigma = estimate::sample_covariance(r.returns);
        }
        else
        {
            if (a.mu.empty() || a.cov.empty())
                throw UsageError("give --prices, or both --mu and --cov");
            p.mu = to_vector(a.mu);
            p.Sigma = parse_matrix(a.cov);
        }

        const auto fc = static_mvo::frontier_constants(p);
        const auto w = static_mvo::solve_static_mvo(p);
        json out = {{"omega", to_json(w.omega)},
                    {"lambda1", w.lambda1},
                    {"lambda2", w.lambda2},
                    {"a", fc.a},
                    {"b", fc.b},
                    {"c", fc.c},
                    {"min_variance_return", fc.min_variance_return()},
                    {"min_variance", 1.0 / fc.a},
                    {"target", p.target},
                    {"variance", w.omega.dot(p.Sigma * w.omega)},
                    {"frontier_variance", static_mvo::frontier_variance(fc, p.target)},
                    {"kkt_residual", static_mvo::kkt_residual(p, w)}};

        const fs::path dir = prepare_dir(run.out_flag);
        write_json(dir / "mvo.json", out);
        run.outputs.push_back("mvo.json");
        run.params = {{"target", p.target}, {"mu", to_json(p.mu)}};
        if (!a.prices.empty())
            run.params["prices"] = fs::absolute(a.prices).string();
        else
            run.params["cov"] = a.cov;
        run.finish(dir);
    }

    // ---------------------------------------------------------------- policy

    struct PolicyArgs
    {
        std::string model = "gbm";
        std::vector<double> mu{0.125};
        std::vector<double> variance{0.2};
        std::vector<double> sigma_bar;
        std::vector<double> alpha{1.0};
        std::vector<double> price{1.0};
        double corr = 0.0;
        double r = 0.025;
        double T = 1.0;
        double gamma = 1.0;
        double t = 0.0;
        std::size_t lattice = 0;
        std::size_t gain_paths = 0;
        std::uint64_t seed = 0;
        std::size_t threads = 1;
    };

    void cmd_policy(const PolicyArgs &a, Run &run)
    {
        if (a.model != "gbm" && a.model != "cev")
            throw UsageError("--model must be gbm or cev");
        const std::size_t n = a.mu.size();
        if (n == 0)
            throw UsageError("--mu needs at least one value");
        const Matrix corr = constant_correlation(n, a.corr);
        json out;
        out["model"] = a.model;
        out["t"] = a.t;

        if (a.model == "gbm")
        {
            const Vector var = broadcast(a.variance, n, "--variance");
            const Vector sd = var.cwiseSqrt();
            const Matrix cov = sd.asDiagonal() * corr * sd.asDiagonal();
            const auto m = MarketParams::from_covariance(to_vector(a.mu), cov, a.r, a.T, a.gamma);
            const Policy p = dynamic_policy::multi_policy(m, a.t);
            out["theta"] = to_json(p.theta);
            out["myopic"] = to_json(p.myopic);
            out["hedging"] = to_json(p.hedging);
            out["anticipated_gain"] = dynamic_policy::anticipated_gain_gbm(m, a.t);
            if (a.lattice > 0)
            {
                if (n != 1)
                    throw UsageError("--lattice applies to a single asset");
                if (a.t != 0.0)
                    throw UsageError("--lattice reports the policy at t = 0");
                const auto lat = dynamic_policy::lattice_equilibrium_oracle(m, a.lattice);
                out["lattice"] = {{"steps", a.lattice}, {"root_theta", lat.root_theta()}, {"root_gain", lat.root_gain}};
            }
        }
        else
        {
            if (a.lattice > 0)
                throw UsageError("--lattice applies to --model gbm only");
            CevParams c;
            c.mu = to_vector(a.mu);
            c.alpha = broadcast(a.alpha, n, "--alpha");
            c.sigma_bar = a.sigma_bar.empty() ? Vector(broadcast(a.variance, n, "--variance").cwiseSqrt())
                                              : broadcast(a.sigma_bar, n, "--sigma-bar");
            c.corr = corr;
            c.r = a.r;
            c.T = a.T;
            c.gamma = a.gamma;
            const Vector S = broadcast(a.price, n, "--price");
            const Policy p = dynamic_policy::cev_policy_multi(c, S, a.t);
            out["price"] = to_json(S);
            out["theta"] = to_json(p.theta);
            out["myopic"] = to_json(p.myopic);
            out["hedging"] = to_json(p.hedging);
            if (a.gain_paths > 0)
            {
                simulate::McOptions opt;
                opt.paths = a.gain_paths;
                opt.n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(52.0 * (a.T - a.t))));
                opt.seed = a.seed;
                opt.threads = a.threads;
                const auto g = simulate::mc_anticipated_gain(c, S, a.t, opt);
                out["anticipated_gain"] = {{"value", g.value}, {"std_error", g.std_error},
                                           {"paths", a.gain_paths}, {"steps", opt.n_steps}};
            }
        }

        const fs::path dir = prepare_dir(run.out_flag);
        write_json(dir / "policy.json", out);
        run.outputs.push_back("policy.json");
        run.params = {{"model", a.model}, {"mu", a.mu}, {"variance", a.variance}, {"sigma_bar", a.sigma_bar},
                      {"alpha", a.alpha}, {"price", a.price}, {"corr", a.corr}, {"r", a.r}, {"T", a.T},
                      {"gamma", a.gamma}, {"t", a.t}, {"lattice", a.lattice}, {"gain_paths", a.gain_paths},
                      {"seed", a.seed}};
        run.finish(dir);
    }

    // ---------------------------------------------------------------- compare-precommit

    struct CompareArgs
    {
        double mu = 0.125;
        double variance = 0.2;
        double r = 0.025;
        double T = 1.0;
        double gamma = 1.0;
        double W0 = 0.0;
        std::size_t paths = 100000;
        std::uint64_t seed = 0;
    };

    void cmd_compare(const CompareArgs &a, Run &run)
    {
        const auto m = MarketParams::single(a.mu, a.variance, a.r, a.T, a.gamma);
        const auto c = wealth_analysis::compare_strategies_mc(m, a.W0, a.paths, a.seed);
        const auto tc = wealth_analysis::tc_wealth_stats(m, a.W0);
        json out = {{"mean_pre", c.mean_pre},
                    {"mean_tc", c.mean_tc},
                    {"se_pre", c.se_pre},
                    {"se_tc", c.se_tc},
                    {"gap", c.gap},
                    {"gap_se", c.gap_se},
                    {"gap_analytic", c.gap_analytic},
                    {"tc_mean_analytic", tc.mean},
                    {"tc_variance_analytic", tc.variance},
                    {"tc_value_function", tc.value_function}};

        const fs::path dir = prepare_dir(run.out_flag);
        write_json(dir / "comparison.json", out);
        run.outputs.push_back("comparison.json");
        run.params = {{"mu", a.mu}, {"variance", a.variance}, {"r", a.r}, {"T", a.T}, {"gamma", a.gamma},
                      {"W0", a.W0}, {"paths", a.paths}, {"seed", a.seed}};
        run.finish(dir);
    }

    // ---------------------------------------------------------------- report

    struct ReportArgs
    {
        std::vector<std::string> wealth;
        double base = 1.0;
    };

    void cmd_report(const ReportArgs &a, Run &run)
    {
        if (a.wealth.empty())
            throw UsageError("--wealth needs at least one file");
        json files = json::array();
        std::vector<double> terminal;
        for (const auto &file : a.wealth)
        {
            const WealthPath w = csv_io::load_wealth(file);
            if (w.size() == 0)
                throw DataError("'" + file + "' has no rows");
            json s = stats_json(metrics::perf_stats(w, a.base));
            s["file"] = file;
            s["terminal_wealth"] = w.wealth.back();
            files.push_back(s);
            terminal.push_back(w.wealth.back());
        }
        std::vector<double> sorted = terminal;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t k = sorted.size();
        const double median = k % 2 == 1 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);

        json out = {{"base", a.base}, {"files", files}, {"median_terminal_wealth", median}};
        const fs::path dir = prepare_dir(run.out_flag);
        write_json(dir / "report.json", out);
        run.outputs.push_back("report.json");
        run.params = {{"wealth", a.wealth}, {"base", a.base}};
        run.finish(dir);
    }

    int run_cli(int argc, char **argv)
    {
        std::vector<std::string> raw(argv + 1, argv + argc);
        std::vector<std::string> args = merge_config(raw);

        CLI::App app{"Dynamic mean-variance portfolio laboratory"};
        app.set_version_flag("--version", DMVO_VERSION);
        app.require_subcommand(1);

        Run run;
        run.argv.assign(argv, argv + argc);

        auto add_out = [&](CLI::App *sub) {
            sub->add_option("--out", run.out_flag, "Output directory (default: $DMVO_OUTPUT_DIR or ./dmvo_out)");
            sub->add_option("--config", "Flat key=value file; flags given on the command line win");
        };

        SimulateArgs sim;
        auto *s = app.add_subcommand("simulate", "Simulate a weekly price panel");
        s->add_option("--model", sim.model, "gbm or cev")->capture_default_str();
        s->add_option("--assets", sim.assets, "Number of assets")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--weeks", sim.weeks, "Number of weekly steps")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--mu", sim.mu, "Annual drift")->capture_default_str();
        s->add_option("--variance", sim.variance, "Annual variance rate")->capture_default_str();
        s->add_option("--sigma", sim.sigma, "Annual volatility (overrides --variance)");
        s->add_option("--corr", sim.corr, "Pairwise correlation")->capture_default_str();
        s->add_option("--s0", sim.s0, "Initial price")->capture_default_str();
        s->add_option("--alpha", sim.alpha, "CEV elasticity")->capture_default_str();
        s->add_option("--sigma-bar", sim.sigma_bar, "CEV scale (default: sqrt(variance / s0^alpha))");
        s->add_option("--r", sim.r, "Riskless rate")->capture_default_str();
        s->add_option("--measure", sim.measure, "physical or hedge-neutral")->capture_default_str();
        s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
        s->add_option("--start", sim.start, "First date (YYYY-MM-DD)")->capture_default_str();
        add_out(s);

        BacktestArgs bt;
        auto *b = app.add_subcommand("backtest", "Weekly rolling-estimation backtest");
        b->add_option("--prices", bt.prices, "Price panel CSV")->required();
        b->add_option("--strategy", bt.strategy, "static|simple|multi|cev|cev-multi")->capture_default_str();
        b->add_option("--target", bt.targets, "Static target return(s)")->delimiter(',')->capture_default_str();
        b->add_option("--alpha", bt.alpha, "CEV elasticity")->capture_default_str();
        b->add_option("--gamma", bt.gamma, "Risk aversion")->capture_default_str();
        b->add_option("--r", bt.r, "Riskless rate")->capture_default_str();
        b->add_option("--batch", bt.batch, "Estimation batch in weeks")->capture_default_str();
        b->add_option("--notional", bt.notional, "Static strategy notional")->capture_default_str();
        b->add_option("--base", bt.base, "Equity base for statistics")->capture_default_str();
        b->add_option("--threads", bt.threads, "Worker threads across targets (0 = all cores)")->capture_default_str();
        add_out(b);

        MvoArgs mvo;
        auto *m = app.add_subcommand("mvo", "Static mean-variance weights");
        m->add_option("--prices", mvo.prices, "Estimate mu and Sigma from a price panel");
        m->add_option("--mu", mvo.mu, "Expected returns")->delimiter(',');
        m->add_option("--cov", mvo.cov, "Covariance rows, e.g. \"1,0;0,1\"");
        m->add_option("--target", mvo.target, "Target return");
        add_out(m);

        PolicyArgs pol;
        auto *p = app.add_subcommand("policy", "Time-consistent dynamic policy");
        p->add_option("--model", pol.model, "gbm or cev")->capture_default_str();
        p->add_option("--mu", pol.mu, "Drift(s)")->delimiter(',')->capture_default_str();
        p->add_option("--variance", pol.variance, "Variance rate(s)")->delimiter(',')->capture_default_str();
        p->add_option("--sigma-bar", pol.sigma_bar, "CEV scale(s)")->delimiter(',');
        p->add_option("--alpha", pol.alpha, "CEV elasticity(ies)")->delimiter(',')->capture_default_str();
        p->add_option("--price", pol.price, "Current price(s)")->delimiter(',')->capture_default_str();
        p->add_option("--corr", pol.corr, "Pairwise correlation")->capture_default_str();
        p->add_option("--r", pol.r, "Riskless rate")->capture_default_str();
        p->add_option("--T", pol.T, "Horizon in years")->capture_default_str();
        p->add_option("--gamma", pol.gamma, "Risk aversion")->capture_default_str();
        p->add_option("--t", pol.t, "Evaluation time")->capture_default_str();
        p->add_option("--lattice", pol.lattice, "Binomial lattice steps for a cross-check")->capture_default_str();
        p->add_option("--gain-paths", pol.gain_paths, "Monte Carlo paths for the CEV anticipated gain");
        p->add_option("--seed", pol.seed, "Master seed")->capture_default_str();
        p->add_option("--threads", pol.threads, "Worker threads (0 = all cores)")->capture_default_str();
        add_out(p);

        CompareArgs cmp;
        auto *c = app.add_subcommand("compare-precommit", "Precommitment vs time-consistent terminal wealth");
        c->add_option("--mu", cmp.mu, "Drift")->capture_default_str();
        c->add_option("--variance", cmp.variance, "Variance rate")->capture_default_str();
        c->add_option("--r", cmp.r, "Riskless rate")->capture_default_str();
        c->add_option("--T", cmp.T, "Horizon in years")->capture_default_str();
        c->add_option("--gamma", cmp.gamma, "Risk aversion")->capture_default_str();
        c->add_option("--W0", cmp.W0, "Initial wealth")->capture_default_str();
        c->add_option("--paths", cmp.paths, "Monte Carlo draws")->capture_default_str();
        c->add_option("--seed", cmp.seed, "Master seed")->capture_default_str();
        add_out(c);

        ReportArgs rep;
        auto *r = app.add_subcommand("report", "Performance statistics of wealth CSV files");
        r->add_option("--wealth", rep.wealth, "Wealth CSV file(s)")->required()->delimiter(',');
        r->add_option("--base", rep.base, "Equity base")->capture_default_str();
        add_out(r);

        std::reverse(args.begin(), args.end());
        try
        {
            app.parse(args);
        }
        catch (const CLI::CallForHelp &e)
        {
            return app.exit(e);
        }
        catch (const CLI::CallForAllHelp &e)
        {
            return app.exit(e);
        }
        catch (const CLI::CallForVersion &e)
        {
            return app.exit(e);
        }
        catch (const CLI::ParseError &e)
        {
            app.exit(e);
            return kExitUsage;
        }

        if (s->parsed())
        {
            run.name = "simulate";
            cmd_simulate(sim, run);
        }
        else if (b->parsed())
        {
            run.name = "backtest";
            cmd_backtest(bt, run);
        }
        else if (m->parsed())
        {
            run.name = "mvo";
            cmd_mvo(mvo, run);
        }
        else if (p->parsed())
        {
            run.name = "policy";
            cmd_policy(pol, run);
        }
        else if (c->parsed())
        {
            run.name = "compare-precommit";
            cmd_compare(cmp, run);
        }
        else if (r->parsed())
        {
            run.name = "report";
            cmd_report(rep, run);
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    try
    {
        return run_cli(argc, argv);
    }
    catch (const UsageError &e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const DomainError &e)
    {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const DataError &e)
    {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    catch (const WarmupError &e)
    {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    catch (const ProtocolError &e)
    {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    catch (const Error &e)
    {
        // Definiteness, singular frontier, instability, resource limits.
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
