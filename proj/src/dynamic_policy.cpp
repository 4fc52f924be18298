#include "dmvo/dynamic_policy.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/linalg.hpp"
#include "dmvo/parallel.hpp"
#include "dmvo/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmvo::dynamic_policy
{
    namespace
    {
        void require_time(double t, double T)
        {
            if (!(t >= 0.0) || t > T)
            {
                std::ostringstream msg;
                msg << "evaluation time t = " << t << " outside [0, " << T << "]";
                throw HorizonError(msg.str());
            }
        }

        void require_single(std::size_t n, const char *op)
        {
            if (n != 1)
                throw DomainError(std::string(op) + " is defined for single-asset markets");
        }

        double scalar_variance(const MarketParams &m)
        {
            const double var = m.sigma(0, 0) * m.sigma(0, 0);
            if (!(var > 0.0))
                throw DefinitenessError("stock variance must be positive", 0);
            return var;
        }

        Vector single(double x) { return Vector::Constant(1, x); }

        /// Piecewise-linear interpolation on an increasing grid, flat beyond the ends.
        double interpolate(const std::vector<double> &xs, const std::vector<double> &ys, double x)
        {
            if (x <= xs.front())
                return ys.front();
            if (x >= xs.back())
                return ys.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
            const std::size_t lo = hi - 1;
            const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
            return ys[lo] + w * (ys[hi] - ys[lo]);
        }

        int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

        std::size_t weekly_steps(double tau)
        {
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(52.0 * tau - 1e-9)));
        }
    }

    double cev_time_factor(double alpha, double r, double tau)
    {
        if (std::abs(r) <= kZeroRate)
            return -alpha * tau;
        return std::expm1(-alpha * r * tau) / r;
    }

    Policy simple_policy(const MarketParams &m, double t)
    {
        m.validate();
        require_single(m.n_assets(), "simple_policy");
        require_time(t, m.T);
        const double var = scalar_variance(m);
        const double discount = std::exp(-m.r * (m.T - t));
        const double myopic = (m.mu(0) - m.r) / (m.gamma * var) * discount;
        return Policy::from_parts(single(myopic), single(0.0));
    }

    Policy multi_policy(const MarketParams &m, double t)
    {
        m.validate();
        require_time(t, m.T);
        if (m.n_assets() == 1)
            return simple_policy(m, t);

        const Cholesky chol(m.covariance(), "covariance sigma sigma^T");
        const double discount = std::exp(-m.r * (m.T - t));
        const Vector excess = m.mu.array() - m.r;
        Vector myopic = chol.solve(excess) * (discount / m.gamma);
        return Policy::from_parts(std::move(myopic), Vector::Zero(excess.size()));
    }

    Policy cev_policy(const CevParams &c, double S, double t)
    {
        c.validate();
        require_single(c.n_assets(), "cev_policy");
        require_time(t, c.T);
        if (!(S > 0.0))
            throw DomainError("CEV policy requires a positive stock price");
        if (!(c.sigma_bar(0) > 0.0))
            throw DefinitenessError("sigma_bar must be positive", 0);

        const double alpha = c.alpha(0);
        const double tau = c.T - t;
        const double discount = std::exp(-c.r * tau);
        const double excess = c.mu(0) - c.r;
        const double s_alpha = std::pow(S, alpha);
        const double var = c.sigma_bar(0) * c.sigma_bar(0) * s_alpha;
        const double kappa_sq = excess * excess / var;

        const double myopic = excess / (c.gamma * var) * discount;
        const double hedging = -(1.0 / c.gamma) * kappa_sq * cev_time_factor(alpha, c.r, tau) * discount;
        return Policy::from_parts(single(myopic), single(hedging));
    }

    Policy cev_policy_multi(const CevParams &c, const Vector &S, double t)
    {
        c.validate();
        require_time(t, c.T);
        if (S.size() != c.mu.size())
            throw DomainError("price vector length must equal the number of assets");
        if (!(S.array() > 0.0).all())
            throw DomainError("CEV policy requires positive stock prices");
        if (c.n_assets() == 1)
            return cev_policy(c, S(0), t);

        const Cholesky chol(c.scale_covariance(), "scale covariance sigma sigma^T");
        const double tau = c.T - t;
        const double discount = std::exp(-c.r * tau);
        const Eigen::Index n = c.mu.size();

        Vector myopic_rhs(n);
        Vector hedging_rhs(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double excess = c.mu(i) - c.r;
            const double s_alpha = std::pow(S(i), c.alpha(i));
            myopic_rhs(i) = excess / s_alpha;
            hedging_rhs(i) = excess * excess * cev_time_factor(c.alpha(i), c.r, tau) / s_alpha;
        }
        Vector myopic = chol.solve(myopic_rhs) * (discount / c.gamma);
        Vector hedging = chol.solve(hedging_rhs) * (-discount / c.gamma);
        return Policy::from_parts(std::move(myopic), std::move(hedging));
    }

    double anticipated_gain_gbm(const MarketParams &m, double t)
    {
        m.validate();
        require_single(m.n_assets(), "anticipated_gain_gbm");
        require_time(t, m.T);
        const double kappa = (m.mu(0) - m.r) / std::sqrt(scalar_variance(m));
        return kappa * kappa * (m.T - t) / m.gamma;
    }

    simulate::McResult anticipated_gain_cev(const CevParams &c, double S, double t, const GainOptions &opt)
    {
        c.validate();
        require_single(c.n_assets(), "anticipated_gain_cev");
        require_time(t, c.T);
        if (!(S > 0.0))
            throw DomainError("anticipated gain requires a positive stock price");

        simulate::McOptions mc;
        mc.paths = opt.paths;
        mc.n_steps = opt.n_steps != 0 ? opt.n_steps : weekly_steps(c.T - t);
        mc.seed = opt.seed;
        mc.threads = opt.threads;
        return simulate::mc_anticipated_gain(c, single(S), t, mc);
    }

    CovarianceReport hedging_covariance_check(const CevParams &c, double S, double t, const CovarianceOptions &opt)
    {
        c.validate();
        require_single(c.n_assets(), "hedging_covariance_check");
        require_time(t, c.T);
        if (!(S > 0.0))
            throw DomainError("covariance check requires a positive stock price");
        if (opt.paths < 100 || opt.gain_paths < 100)
            throw DomainError("covariance check needs at least 100 paths");
        if (opt.grid_points < 2)
            throw DomainError("covariance check needs at least two grid points");

        CovarianceReport report;
        report.hedging = cev_policy(c, S, t).hedging(0);
        report.hedging_sign = sign_of(report.hedging);

        const double step = std::min(opt.step, c.T - t);
        if (!(step > 0.0))
        {
            report.consistent = report.hedging_sign == 0;
            return report;
        }

        // One Euler step under the physical measure.
        const double mu = c.mu(0);
        const double vol = c.sigma_bar(0) * std::pow(S, 0.5 * c.alpha(0));
        const double floor = simulate::kAbsorptionFloor * S;
        std::vector<double> returns(opt.paths);
        std::vector<double> next(opt.paths);
        parallel_for(opt.paths, opt.threads, [&](std::size_t i) {
            NormalStream rng(substream_seed(opt.seed, i));
            const double s1 = std::max(floor, S + S * (mu * step + vol * std::sqrt(step) * rng()));
            next[i] = s1;
            returns[i] = s1 / S - 1.0;
        });

        // Anticipated gain at t + step on a price grid, common random numbers across nodes.
        const auto [lo_it, hi_it] = std::minmax_element(next.begin(), next.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        std::vector<double> grid(opt.grid_points);
        std::vector<double> gain(opt.grid_points);
        GainOptions gain_opt;
        gain_opt.paths = opt.gain_paths;
        gain_opt.seed = mix64(opt.seed ^ 0xA5A5A5A5A5A5A5A5ull);
        gain_opt.threads = opt.threads;
        for (std::size_t g = 0; g < opt.grid_points; ++g)
        {
            grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(opt.grid_points - 1);
            gain[g] = anticipated_gain_cev(c, grid[g], t + step, gain_opt).value;
        }

        const auto [fmin, fmax] = std::minmax_element(gain.begin(), gain.end());
        if (*fmin == *fmax)
        {
            report.consistent = report.hedging_sign == 0;
            return report;
        }

        std::vector<double> df(opt.paths);
        for (std::size_t i = 0; i < opt.paths; ++i)
            df[i] = interpolate(grid, gain, next[i]);

        const double n = static_cast<double>(opt.paths);
        double mean_r = 0.0;
        double mean_f = 0.0;
        for (std::size_t i = 0; i < opt.paths; ++i)
        {
            mean_r += returns[i];
            mean_f += df[i];
        }
        mean_r /= n;
        mean_f /= n;
        double srr = 0.0;
        double sff = 0.0;
        double srf = 0.0;
        for (std::size_t i = 0; i < opt.paths; ++i)
        {
            const double a = returns[i] - mean_r;
            const double b = df[i] - mean_f;
            srr += a * a;
            sff += b * b;
            srf += a * b;
        }
        report.covariance = srf / (n - 1.0);
        report.correlation = (srr > 0.0 && sff > 0.0) ? srf / std::sqrt(srr * sff) : 0.0;
        report.covariance_sign = sign_of(report.covariance);
        report.consistent = report.covariance_sign == -report.hedging_sign;
        return report;
    }

    LatticeResult lattice_equilibrium_oracle(const MarketParams &m, std::size_t steps)
    {
        m.validate();
        require_single(m.n_assets(), "lattice_equilibrium_oracle");
        if (steps < 2)
            throw DomainError("lattice needs at least two steps");
        if (steps > kMaxLatticeSteps)
        {
            std::ostringstream msg;
            msg << "lattice with " << steps << " steps exceeds the limit of " << kMaxLatticeSteps;
            throw ResourceError(msg.str());
        }

        const double sigma = std::sqrt(scalar_variance(m));
        LatticeResult out;
        out.dt = m.T / static_cast<double>(steps);
        out.up = std::exp(sigma * std::sqrt(out.dt));
        out.down = 1.0 / out.up;
        const double growth = std::exp(m.mu(0) * out.dt);
        const double bond = std::exp(m.r * out.dt);
        out.p_up = (growth - out.down) / (out.up - out.down);
        if (!(out.p_up > 0.0 && out.p_up < 1.0))
            throw DomainError("lattice time step too coarse: up-probability outside (0, 1)");

        const double p = out.p_up;
        const double spread = out.up - out.down;
        // E[R] - e^{r dt} computed as e^{mu dt} - e^{r dt} so that mu = r gives exactly zero.
        const double excess = growth - bond;

        out.theta.resize(steps);
        std::vector<double> gain_next(steps + 1, 0.0);
        std::vector<double> gain(steps, 0.0);
        for (std::size_t k = steps; k-- > 0;)
        {
            // Compounding from t + dt to T of money held at t + dt.
            const double carry = std::exp(m.r * (m.T - static_cast<double>(k + 1) * out.dt));
            const double mean_x = carry * excess;
            const double var_x = carry * carry * p * (1.0 - p) * spread * spread;

            auto &level = out.theta[k];
            level.resize(k + 1);
            gain.resize(k + 1);
            for (std::size_t j = 0; j <= k; ++j)
            {
                const double g_up = gain_next[j + 1];
                const double g_down = gain_next[j];
                const double cov_xg = p * (1.0 - p) * carry * spread * (g_up - g_down);
                const double theta = (mean_x - m.gamma * cov_xg) / (m.gamma * var_x);
                level[j] = theta;
                gain[j] = theta * mean_x + p * g_up + (1.0 - p) * g_down;
            }
            gain_next.assign(gain.begin(), gain.end());
        }
        out.root_gain = gain_next.front();
        return out;
    }
}
