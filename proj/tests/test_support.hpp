#pragma once

#include "dmvo/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dmvo::test
{
    /// Random symmetric positive-definite matrix, well conditioned.
    inline Matrix random_pd(int n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> z(0.0, 0.3);
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = z(rng);
        Matrix s = a * a.transpose() + 0.05 * Matrix::Identity(n, n);
        return 0.5 * (s + s.transpose());
    }

    inline Vector random_vector(int n, std::mt19937_64 &rng, double lo = -0.1, double hi = 0.3)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        Vector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = u(rng);
        return v;
    }

    struct MeanSe
    {
        double mean = 0.0;
        double se = 0.0;
    };

    inline MeanSe mean_se(const std::vector<double> &x)
    {
        const double n = static_cast<double>(x.size());
        double s = 0.0;
        for (double v : x)
            s += v;
        MeanSe out;
        out.mean = s / n;
        double ss = 0.0;
        for (double v : x)
            ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (n - 1.0) / n);
        return out;
    }

    /// Standard error of the sample variance for i.i.d. data, from the fourth central moment.
    inline MeanSe variance_se(const std::vector<double> &x)
    {
        const double n = static_cast<double>(x.size());
        const double m = mean_se(x).mean;
        double m2 = 0.0;
        double m4 = 0.0;
        for (double v : x)
        {
            const double d = (v - m) * (v - m);
            m2 += d;
            m4 += d * d;
        }
        m2 /= n;
        m4 /= n;
        return {m2 * n / (n - 1.0), std::sqrt((m4 - m2 * m2) / n)};
    }

    inline bool within_se(double value, double expected, double se, double k = 3.0)
    {
        return std::abs(value - expected) <= k * se;
    }
}
