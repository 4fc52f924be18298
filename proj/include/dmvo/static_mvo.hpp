/**
 * @file static_mvo.hpp
 * @brief Equality-constrained static mean-variance optimization.
 *
 * Minimize   w^T Sigma w / 2
 * subject to sum(w) = 1,  w^T mu = target.
 *
 * With a = 1^T Sigma^-1 1, b = 1^T Sigma^-1 mu, c = mu^T Sigma^-1 mu the
 * solution is
 *
 *   w = ((c - b t) Sigma^-1 1 + (a t - b) Sigma^-1 mu) / (a c - b^2)
 *
 * and the frontier variance is (a t^2 - 2 b t + c) / (a c - b^2).
 * Short positions are allowed.
 *
 * Both are evaluated through the equivalent split
 *   w = Sigma^-1 1 / a + (t - b/a) Sigma^-1 m / q,  m = mu - (b/a) 1,  q = m^T Sigma^-1 m,
 * with a c - b^2 = a q, which avoids the cancellation in a c - b^2 when the
 * expected returns are nearly equal.
 */
#pragma once

#include "dmvo/types.hpp"

namespace dmvo::static_mvo
{
    struct StaticProblem
    {
        Vector mu;
        Matrix Sigma;
        double target = 0.0;

        std::size_t n_assets() const { return static_cast<std::size_t>(mu.size()); }

        /// Checks dimensions, finiteness and symmetry. Definiteness is checked on factorization.
        void validate() const;
    };

    struct FrontierConstants
    {
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;
        /// m^T Sigma^-1 m with m = mu - (b/a) 1; equals c - b^2/a without cancellation.
        double q = 0.0;

        double determinant() const { return a * q; }
        /// Return of the global minimum-variance portfolio, b / a.
        double min_variance_return() const { return b / a; }
    };

    struct Weights
    {
        Vector omega;
        double lambda1 = 0.0;
        double lambda2 = 0.0;
    };

    /// ac - b^2 at or below this multiple of a*c is treated as a degenerate frontier.
    inline constexpr double kFrontierTolerance = 1e-12;

    FrontierConstants frontier_constants(const StaticProblem &p);

    /// Closed-form minimum-variance weights. N = 1 is accepted only when target equals mu.
    Weights solve_static_mvo(const StaticProblem &p);

    double frontier_variance(const FrontierConstants &fc, double target);

    /// Solves the (N+2) x (N+2) KKT system with a dense LU, independent of the closed form.
    Weights kkt_oracle(const StaticProblem &p);

    /// max |Sigma w - lambda1 1 - lambda2 mu|.
    double kkt_residual(const StaticProblem &p, const Weights &w);
}
