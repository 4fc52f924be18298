/**
 * @file simulate.hpp
 * @brief Correlated GBM / CEV path generation under the physical and the
 *        hedge-neutral measure, Radon-Nikodym weights, and the Monte Carlo
 *        anticipated-gain estimator.
 *
 * Randomness for path i of a run is drawn only from
 * substream_seed(master seed, i), and every reduction runs in path order,
 * so output is bit-identical for any thread count.
 */
#pragma once

#include "dmvo/types.hpp"

#include <cstdint>
#include <variant>

namespace dmvo::simulate
{
    enum class Measure
    {
        physical,
        hedge_neutral
    };

    struct SimConfig
    {
        std::size_t n_assets = 1;
        std::size_t n_steps = 1;
        double dt = 1.0 / 52.0;
        Vector s0;
        std::uint64_t seed = 0;
        Measure measure = Measure::physical;

        void validate() const;
    };

    /// CEV paths are absorbed once they reach this fraction of their initial price.
    inline constexpr double kAbsorptionFloor = 1e-8;

    /// Absorbed share of paths (or assets) above which CEV simulation is rejected.
    inline constexpr double kMaxAbsorbedFraction = 0.5;

    /// n_draws x N standard normals with correlation `corr`.
    Matrix correlated_normals(const Matrix &corr, std::size_t n_draws, std::uint64_t seed);

    /// Exact lognormal stepping.
    PriceSeries gbm_paths(const MarketParams &m, const SimConfig &cfg);

    /// Euler-Maruyama with absorption at kAbsorptionFloor * s0.
    PriceSeries cev_paths(const CevParams &c, const SimConfig &cfg);

    /**
     * Radon-Nikodym weight dP* / dP for a single-asset path simulated under the physical measure.
     * The driving Brownian motion is recovered from log-price increments.
     * Requires a uniform time grid (ProtocolError otherwise).
     */
    double rn_weight(const MarketParams &m, const PriceSeries &path);

    using Model = std::variant<MarketParams, CevParams>;

    struct McOptions
    {
        std::size_t paths = 10000;
        std::size_t n_steps = 52;
        std::uint64_t seed = 0;
        std::size_t threads = 1;
    };

    struct McResult
    {
        double value = 0.0;
        double std_error = 0.0;
        double absorbed_fraction = 0.0;
    };

    /**
     * Anticipated gain f(S0, t) = E*[ int_t^T (1/gamma) k_s^T k_s ds ], with k_s the
     * instantaneous market price of risk, by trapezoid rule on hedge-neutral paths.
     */
    McResult mc_anticipated_gain(const Model &model, const Vector &s0, double t, const McOptions &opt);

    /// Squared market price of risk divided by gamma at price vector s.
    double sharpe_integrand(const Model &model, const Vector &s);
}
