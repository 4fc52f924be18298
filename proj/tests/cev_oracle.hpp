#pragma once

#include <cmath>

namespace dmvo::test
{
    /**
     * Anticipated gain of a single-asset CEV market from the moment ODE.
     *
     * Under the hedge-neutral measure dS/S = r dt + sb S^(a/2) dw*, Ito on
     * Y = S^-a gives dE[Y]/ds = -a r E[Y] + a (a + 1) sb^2 / 2, so
     *   E[Y_s] = Y0 e^{-a r u} + (c / (a r)) (1 - e^{-a r u}),  u = s - t.
     * f = (mu - r)^2 / (gamma sb^2) * int_0^tau E[Y] du.
     */
    inline double cev_gain_ode(double mu, double r, double sb, double a, double gamma, double S, double tau)
    {
        const double y0 = std::pow(S, -a);
        const double c = a * (a + 1.0) * sb * sb / 2.0;
        double integral = 0.0;
        const double ar = a * r;
        if (std::abs(ar) < 1e-14)
        {
            integral = y0 * tau + 0.5 * c * tau * tau;
        }
        else
        {
            const double decay = (1.0 - std::exp(-ar * tau)) / ar;
            integral = y0 * decay + (c / ar) * (tau - decay);
        }
        return (mu - r) * (mu - r) / (gamma * sb * sb) * integral;
    }
}
