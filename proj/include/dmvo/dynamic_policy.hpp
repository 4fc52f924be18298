/**
 * @file dynamic_policy.hpp
 * @brief Time-consistent dynamic mean-variance policies.
 *
 * Policies are money amounts per asset, independent of current wealth,
 * split into a myopic part (mu - r)/(gamma sigma^2) e^{-r(T-t)} and a
 * hedging part -S df/dS e^{-r(T-t)}, where f is the anticipated gain
 * computed under the hedge-neutral measure. With constant GBM parameters
 * f is deterministic and hedging vanishes; under CEV it does not.
 */
#pragma once

#include "dmvo/simulate.hpp"
#include "dmvo/types.hpp"

#include <cstdint>
#include <vector>

namespace dmvo::dynamic_policy
{
    /// Below this |r| the factor (e^{-alpha r tau} - 1)/r is replaced by its limit -alpha tau.
    inline constexpr double kZeroRate = 1e-12;

    /// (e^{-alpha r tau} - 1) / r with the removable singularity at r = 0 filled in.
    double cev_time_factor(double alpha, double r, double tau);

    Policy simple_policy(const MarketParams &m, double t);

    Policy multi_policy(const MarketParams &m, double t);

    Policy cev_policy(const CevParams &c, double S, double t);

    /**
     * Multi-asset CEV policy:
     *   myopic  = (1/gamma) C^{-1} [(mu - r) / S^alpha] e^{-r tau}
     *   hedging = -(1/gamma) C^{-1} [(mu - r)^2 F(alpha, r, tau) / S^alpha] e^{-r tau}
     * with C = diag(sigma_bar) corr diag(sigma_bar), operations on brackets
     * taken componentwise and F = cev_time_factor per asset.
     */
    Policy cev_policy_multi(const CevParams &c, const Vector &S, double t);

    /// (1/gamma) ((mu - r)/sigma)^2 (T - t) for a single-asset constant market.
    double anticipated_gain_gbm(const MarketParams &m, double t);

    struct GainOptions
    {
        std::size_t paths = 10000;
        std::size_t n_steps = 0; ///< 0 picks ceil(52 * (T - t)) weekly steps, at least 1
        std::uint64_t seed = 0;
        std::size_t threads = 1;
    };

    /// Monte Carlo anticipated gain for a single-asset CEV market under the hedge-neutral measure.
    simulate::McResult anticipated_gain_cev(const CevParams &c, double S, double t, const GainOptions &opt);

    struct CovarianceReport
    {
        double covariance = 0.0;  ///< cov(dS/S, df) over one step
        double correlation = 0.0; ///< 0 when either side has zero variance
        double hedging = 0.0;     ///< hedging component of cev_policy at (S, t)
        int covariance_sign = 0;
        int hedging_sign = 0;
        /// True when hedging has the sign opposite to the covariance (or both vanish).
        bool consistent = false;
    };

    struct CovarianceOptions
    {
        std::size_t paths = 10000;      ///< one-step paths under the physical measure
        std::size_t grid_points = 17;   ///< S-grid for the anticipated gain at t + step
        std::size_t gain_paths = 2000;  ///< Monte Carlo paths per grid point
        double step = 1.0 / 52.0;
        std::uint64_t seed = 0;
        std::size_t threads = 1;
    };

    /**
     * Estimates the covariance between the one-step stock return and the
     * one-step change of the anticipated gain. f at t + step is evaluated by
     * Monte Carlo on a price grid (common random numbers across the grid) and
     * interpolated linearly, so the check does not use the hedging formula.
     */
    CovarianceReport hedging_covariance_check(const CevParams &c, double S, double t, const CovarianceOptions &opt);

    /// Largest step count the lattice oracle accepts.
    inline constexpr std::size_t kMaxLatticeSteps = std::size_t{1} << 15;

    struct LatticeResult
    {
        double dt = 0.0;
        double up = 0.0;
        double down = 0.0;
        double p_up = 0.0;
        /// theta[k][j]: money in stock at time k dt after j up-moves, k < steps.
        std::vector<std::vector<double>> theta;
        /// Anticipated gain at the root node.
        double root_gain = 0.0;

        double root_theta() const { return theta.front().front(); }
    };

    /**
     * Equilibrium policy of the recursion U_t = E_t[U_{t+dt}] - (gamma/2) Var_t[E_{t+dt} W_T]
     * on a recombining binomial tree with factors e^{+-sigma sqrt(dt)} and
     * drift-matched up-probability. Each node solves its one-step quadratic
     * given the already-fixed policies downstream.
     */
    LatticeResult lattice_equilibrium_oracle(const MarketParams &m, std::size_t steps);
}
