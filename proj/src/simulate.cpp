#include "dmvo/simulate.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/linalg.hpp"
#include "dmvo/parallel.hpp"
#include "dmvo/random.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

namespace dmvo::simulate
{
    namespace
    {
        /// x^e with exact shortcuts for the exponents CEV runs use most.
        double power(double x, double e)
        {
            if (e == 0.0)
                return 1.0;
            if (e == 0.5)
                return std::sqrt(x);
            if (e == -0.5)
                return 1.0 / std::sqrt(x);
            if (e == 1.0)
                return x;
            return std::pow(x, e);
        }

        void fill_normals(NormalStream &rng, Vector &z)
        {
            for (Eigen::Index i = 0; i < z.size(); ++i)
                z(i) = rng();
        }

        std::vector<double> time_grid(std::size_t n_steps, double dt, double t0 = 0.0)
        {
            std::vector<double> times(n_steps + 1);
            for (std::size_t k = 0; k <= n_steps; ++k)
                times[k] = t0 + static_cast<double>(k) * dt;
            return times;
        }

        /// Exact log-step for GBM: log S += (drift - var/2) dt + sqrt(dt) sigma z.
        class GbmStepper
        {
        public:
            GbmStepper(const MarketParams &m, Measure measure, double dt)
                : sigma_(m.sigma), sqrt_dt_(std::sqrt(dt))
            {
                const Vector drift = measure == Measure::physical
                                         ? m.mu
                                         : Vector::Constant(m.mu.size(), m.r);
                log_drift_ = (drift - 0.5 * m.covariance().diagonal()) * dt;
            }

            void step(Vector &log_s, const Vector &z) const
            {
                log_s += log_drift_ + sqrt_dt_ * (sigma_ * z);
            }

        private:
            Matrix sigma_;
            Vector log_drift_;
            double sqrt_dt_;
        };

        /// Euler step for CEV: S += S (drift dt + sigma_bar S^(alpha/2) sqrt(dt) (L z)).
        class CevStepper
        {
        public:
            CevStepper(const CevParams &c, Measure measure, double dt, const Vector &s0)
                : factor_(psd_factor(c.corr, "correlation matrix")),
                  sigma_bar_(c.sigma_bar),
                  half_alpha_(0.5 * c.alpha),
                  floor_(kAbsorptionFloor * s0),
                  dt_(dt),
                  sqrt_dt_(std::sqrt(dt))
            {
                drift_ = measure == Measure::physical ? c.mu : Vector::Constant(c.mu.size(), c.r);
            }

            /// Returns the number of assets newly absorbed by this step.
            std::size_t step(Vector &s, const Vector &z, std::vector<char> &absorbed) const
            {
                const Vector shock = factor_ * z;
                std::size_t hits = 0;
                for (Eigen::Index i = 0; i < s.size(); ++i)
                {
                    if (absorbed[i])
                        continue;
                    const double vol = sigma_bar_(i) * power(s(i), half_alpha_(i));
                    const double next = s(i) + s(i) * (drift_(i) * dt_ + vol * sqrt_dt_ * shock(i));
                    if (!(next > floor_(i)))
                    {
                        s(i) = floor_(i);
                        absorbed[i] = 1;
                        ++hits;
                    }
                    else
                    {
                        s(i) = next;
                    }
                }
                return hits;
            }

        private:
            Matrix factor_;
            Vector sigma_bar_;
            Vector half_alpha_;
            Vector drift_;
            Vector floor_;
            double dt_;
            double sqrt_dt_;
        };

        /// (1/gamma) k^T k evaluated at a price vector, with the state-free parts precomputed.
        class Integrand
        {
        public:
            explicit Integrand(const Model &model)
            {
                if (const auto *m = std::get_if<MarketParams>(&model))
                {
                    const Vector excess = m->mu.array() - m->r;
                    const Cholesky chol(m->covariance(), "covariance matrix");
                    constant_ = excess.dot(chol.solve(excess)) / m->gamma;
                    is_constant_ = true;
                }
                else
                {
                    const auto &c = std::get<CevParams>(model);
                    excess_ = c.mu.array() - c.r;
                    sigma_bar_ = c.sigma_bar;
                    half_alpha_ = 0.5 * c.alpha;
                    gamma_ = c.gamma;
                    corr_ = std::make_unique<Cholesky>(c.corr, "correlation matrix");
                    single_ = c.n_assets() == 1;
                    zero_excess_ = (excess_.array() == 0.0).all();
                }
            }

            double operator()(const Vector &s) const
            {
                if (is_constant_)
                    return constant_;
                if (zero_excess_)
                    return 0.0;
                if (single_)
                {
                    const double k = excess_(0) / (sigma_bar_(0) * power(s(0), half_alpha_(0)));
                    return k * k / gamma_;
                }
                Vector x(s.size());
                for (Eigen::Index i = 0; i < s.size(); ++i)
                    x(i) = excess_(i) / (sigma_bar_(i) * power(s(i), half_alpha_(i)));
                return x.dot(corr_->solve(x)) / gamma_;
            }

            bool state_free() const { return is_constant_ || zero_excess_; }

        private:
            bool is_constant_ = false;
            bool single_ = false;
            bool zero_excess_ = false;
            double constant_ = 0.0;
            double gamma_ = 1.0;
            Vector excess_;
            Vector sigma_bar_;
            Vector half_alpha_;
            std::unique_ptr<Cholesky> corr_;
        };
    }

    void SimConfig::validate() const
    {
        if (n_assets < 1)
            throw DomainError("simulation needs at least one asset");
        if (n_steps < 1)
            throw DomainError("simulation needs at least one step");
        if (!(dt > 0.0))
            throw DomainError("time step dt must be positive");
        if (static_cast<std::size_t>(s0.size()) != n_assets)
            throw DomainError("initial price vector length must equal n_assets");
        if (!(s0.array() > 0.0).all())
            throw DomainError("initial prices must be positive");
    }

    Matrix correlated_normals(const Matrix &corr, std::size_t n_draws, std::uint64_t seed)
    {
        const Matrix factor = psd_factor(corr, "correlation matrix");
        const Eigen::Index n = corr.rows();
        NormalStream rng(substream_seed(seed, 0));

        Matrix out(static_cast<Eigen::Index>(n_draws), n);
        Vector z(n);
        for (std::size_t k = 0; k < n_draws; ++k)
        {
            fill_normals(rng, z);
            out.row(static_cast<Eigen::Index>(k)) = (factor * z).transpose();
        }
        return out;
    }

    PriceSeries gbm_paths(const MarketParams &m, const SimConfig &cfg)
    {
        m.validate();
        cfg.validate();
        if (m.n_assets() != cfg.n_assets)
            throw DomainError("market and simulation config disagree on the number of assets");

        const GbmStepper stepper(m, cfg.measure, cfg.dt);
        NormalStream rng(substream_seed(cfg.seed, 0));

        PriceSeries out;
        out.times = time_grid(cfg.n_steps, cfg.dt);
        out.prices.resize(static_cast<Eigen::Index>(cfg.n_steps + 1), static_cast<Eigen::Index>(cfg.n_assets));

        const Vector log_s0 = cfg.s0.array().log();
        Vector log_s = log_s0;
        Vector z(static_cast<Eigen::Index>(cfg.n_assets));
        out.prices.row(0) = cfg.s0.transpose();
        for (std::size_t k = 1; k <= cfg.n_steps; ++k)
        {
            fill_normals(rng, z);
            stepper.step(log_s, z);
            out.prices.row(static_cast<Eigen::Index>(k)) = log_s.array().exp().transpose();
        }
        return out;
    }

    PriceSeries cev_paths(const CevParams &c, const SimConfig &cfg)
    {
        c.validate();
        cfg.validate();
        if (c.n_assets() != cfg.n_assets)
            throw DomainError("market and simulation config disagree on the number of assets");

        const CevStepper stepper(c, cfg.measure, cfg.dt, cfg.s0);
        NormalStream rng(substream_seed(cfg.seed, 0));

        PriceSeries out;
        out.times = time_grid(cfg.n_steps, cfg.dt);
        out.prices.resize(static_cast<Eigen::Index>(cfg.n_steps + 1), static_cast<Eigen::Index>(cfg.n_assets));

        Vector s = cfg.s0;
        Vector z(static_cast<Eigen::Index>(cfg.n_assets));
        std::vector<char> absorbed(cfg.n_assets, 0);
        std::size_t n_absorbed = 0;
        out.prices.row(0) = s.transpose();
        for (std::size_t k = 1; k <= cfg.n_steps; ++k)
        {
            fill_normals(rng, z);
            n_absorbed += stepper.step(s, z, absorbed);
            out.prices.row(static_cast<Eigen::Index>(k)) = s.transpose();
        }

        if (static_cast<double>(n_absorbed) > kMaxAbsorbedFraction * static_cast<double>(cfg.n_assets))
        {
            std::ostringstream msg;
            msg << n_absorbed << " of " << cfg.n_assets
                << " CEV price paths were absorbed at the floor; reduce dt";
            throw InstabilityError(msg.str());
        }
        return out;
    }

    double rn_weight(const MarketParams &m, const PriceSeries &path)
    {
        m.validate();
        if (m.n_assets() != 1 || path.n_assets() != 1)
            throw DomainError("rn_weight is defined for single-asset markets");
        if (path.n_rows() < 2 || path.times.size() != path.n_rows())
            throw ProtocolError("path needs at least two time stamps matching its price rows");

        const double sigma = m.sigma(0, 0);
        if (!(sigma > 0.0))
            throw DomainError("rn_weight requires positive volatility");
        const double kappa = (m.mu(0) - m.r) / sigma;
        if (kappa == 0.0)
            return 1.0;

        const double dt = path.times[1] - path.times[0];
        if (!(dt > 0.0))
            throw ProtocolError("path times must be strictly increasing");
        for (std::size_t k = 1; k + 1 < path.times.size(); ++k)
        {
            const double step = path.times[k + 1] - path.times[k];
            if (std::abs(step - dt) > 1e-9 * dt)
                throw ProtocolError("rn_weight requires a uniform time grid");
        }

        const double horizon = path.times.back() - path.times.front();
        const double log_drift = (m.mu(0) - 0.5 * sigma * sigma) * dt;
        double w = 0.0;
        for (Eigen::Index k = 0; k + 1 < path.prices.rows(); ++k)
        {
            const double s_now = path.prices(k, 0);
            const double s_next = path.prices(k + 1, 0);
            if (!(s_now > 0.0) || !(s_next > 0.0))
                throw DomainError("rn_weight requires positive prices");
            w += (std::log(s_next / s_now) - log_drift) / sigma;
        }
        return std::exp(-0.5 * kappa * kappa * horizon - kappa * w);
    }

    double sharpe_integrand(const Model &model, const Vector &s)
    {
        return Integrand(model)(s);
    }

    McResult mc_anticipated_gain(const Model &model, const Vector &s0, double t, const McOptions &opt)
    {
        const double horizon = std::visit([](const auto &p) { p.validate(); return p.T; }, model);
        const std::size_t n_assets = std::visit([](const auto &p) { return p.n_assets(); }, model);

        if (opt.paths < 100)
            throw DomainError("anticipated gain needs at least 100 paths");
        if (opt.n_steps < 1)
            throw DomainError("anticipated gain needs at least one time step");
        if (static_cast<std::size_t>(s0.size()) != n_assets)
            throw DomainError("initial price vector length must equal the number of assets");
        if (!(s0.array() > 0.0).all())
            throw DomainError("initial prices must be positive");
        if (!(t >= 0.0) || t > horizon)
            throw DomainError("t must lie in [0, T]");

        const Integrand integrand(model);
        const double tau = horizon - t;
        if (tau == 0.0)
            return {};

        const double h = tau / static_cast<double>(opt.n_steps);

        if (integrand.state_free())
        {
            // Deterministic integrand: every path gives the same value.
            const double g = integrand(s0);
            return {g * tau, 0.0, 0.0};
        }

        const auto &cev = std::get<CevParams>(model);
        const CevStepper stepper(cev, Measure::hedge_neutral, h, s0);

        std::vector<double> values(opt.paths);
        std::vector<char> path_absorbed(opt.paths, 0);
        parallel_for(opt.paths, opt.threads, [&](std::size_t i) {
            NormalStream rng(substream_seed(opt.seed, i));
            Vector s = s0;
            Vector z(static_cast<Eigen::Index>(n_assets));
            std::vector<char> absorbed(n_assets, 0);
            double prev = integrand(s);
            double acc = 0.0;
            std::size_t hits = 0;
            for (std::size_t k = 0; k < opt.n_steps; ++k)
            {
                fill_normals(rng, z);
                hits += stepper.step(s, z, absorbed);
                const double next = integrand(s);
                acc += 0.5 * (prev + next);
                prev = next;
            }
            values[i] = acc * h;
            path_absorbed[i] = hits > 0 ? 1 : 0;
        });

        double sum = 0.0;
        std::size_t absorbed = 0;
        for (std::size_t i = 0; i < opt.paths; ++i)
        {
            sum += values[i];
            absorbed += static_cast<std::size_t>(path_absorbed[i]);
        }
        const double n = static_cast<double>(opt.paths);
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : values)
            ss += (v - mean) * (v - mean);

        McResult res;
        res.value = mean;
        res.std_error = std::sqrt(ss / (n - 1.0) / n);
        res.absorbed_fraction = static_cast<double>(absorbed) / n;
        if (res.absorbed_fraction > kMaxAbsorbedFraction)
        {
            std::ostringstream msg;
            msg << "anticipated gain: " << absorbed << " of " << opt.paths
                << " paths were absorbed at the price floor; reduce the time step";
            throw InstabilityError(msg.str());
        }
        return res;
    }
}
