#include "dmvo/static_mvo.hpp"
#include "dmvo/errors.hpp"
#include "dmvo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmvo::static_mvo
{
    namespace
    {
        struct Solved
        {
            FrontierConstants fc;
            Vector inv_ones;
            Vector inv_mu;
            Vector inv_spread; ///< Sigma^-1 (mu - (b/a) 1)
        };

        Solved solve_frontier(const StaticProblem &p)
        {
            p.validate();
            const Cholesky chol(p.Sigma, "covariance matrix");
            const Vector ones = Vector::Ones(p.mu.size());

            Solved s;
            s.inv_ones = chol.solve(ones);
            s.inv_mu = chol.solve(p.mu);
            s.fc.a = ones.dot(s.inv_ones);
            s.fc.b = ones.dot(s.inv_mu);
            s.fc.c = p.mu.dot(s.inv_mu);

            const Vector spread = p.mu.array() - s.fc.b / s.fc.a;
            s.inv_spread = chol.solve(spread);
            s.fc.q = std::max(0.0, spread.dot(s.inv_spread));
            return s;
        }

        void require_nondegenerate(const FrontierConstants &fc)
        {
            const double det = fc.determinant();
            if (!(det > kFrontierTolerance * std::abs(fc.a * fc.c)) || !(det > 0.0))
            {
                std::ostringstream msg;
                msg << "singular frontier: ac - b^2 = " << det
                    << " (a = " << fc.a << ", b = " << fc.b << ", c = " << fc.c
                    << "); expected returns are (nearly) identical across assets";
                throw SingularError(msg.str());
            }
        }
    }

    void StaticProblem::validate() const
    {
        const auto n = mu.size();
        if (n < 1)
            throw DomainError("static problem needs at least one asset");
        if (Sigma.rows() != n || Sigma.cols() != n)
            throw DomainError("covariance dimensions do not match expected-return vector");
        if (!mu.allFinite() || !Sigma.allFinite() || !std::isfinite(target))
            throw DomainError("static problem inputs must be finite");
        require_symmetric(Sigma, "covariance matrix");
    }

    FrontierConstants frontier_constants(const StaticProblem &p)
    {
        return solve_frontier(p).fc;
    }

    Weights solve_static_mvo(const StaticProblem &p)
    {
        const Solved s = solve_frontier(p);

        if (p.n_assets() == 1)
        {
            const double m = p.mu(0);
            if (std::abs(p.target - m) > 1e-12 * std::max(1.0, std::abs(m)))
                throw SingularError("single-asset problem is infeasible unless target equals the asset's expected return");
            Weights w;
            w.omega = Vector::Ones(1);
            // Stationarity only pins lambda1 + m lambda2 = Sigma; take lambda2 = 0.
            w.lambda1 = p.Sigma(0, 0);
            w.lambda2 = 0.0;
            return w;
        }

        const FrontierConstants &fc = s.fc;
        require_nondegenerate(fc);

        // lambda2 = (a t - b) / (a c - b^2), lambda1 = (c - b t) / (a c - b^2), written through q.
        const double excess = p.target - fc.min_variance_return();
        Weights w;
        w.lambda2 = excess / fc.q;
        w.lambda1 = 1.0 / fc.a - fc.min_variance_return() * w.lambda2;
        w.omega = s.inv_ones / fc.a + w.lambda2 * s.inv_spread;
        return w;
    }

    double frontier_variance(const FrontierConstants &fc, double target)
    {
        require_nondegenerate(fc);
        const double excess = target - fc.min_variance_return();
        return 1.0 / fc.a + excess * excess / fc.q;
    }

    Weights kkt_oracle(const StaticProblem &p)
    {
        p.validate();
        const Eigen::Index n = p.mu.size();

        Matrix k = Matrix::Zero(n + 2, n + 2);
        k.topLeftCorner(n, n) = p.Sigma;
        k.block(0, n, n, 1) = -Vector::Ones(n);
        k.block(0, n + 1, n, 1) = -p.mu;
        k.block(n, 0, 1, n) = Vector::Ones(n).transpose();
        k.block(n + 1, 0, 1, n) = p.mu.transpose();

        Vector rhs = Vector::Zero(n + 2);
        rhs(n) = 1.0;
        rhs(n + 1) = p.target;

        Eigen::FullPivLU<Matrix> lu(k);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible())
        {
            std::ostringstream msg;
            msg << "singular KKT system: rank " << lu.rank() << " of " << (n + 2);
            throw SingularError(msg.str());
        }

        const Vector x = lu.solve(rhs);
        Weights w;
        w.omega = x.head(n);
        w.lambda1 = x(n);
        w.lambda2 = x(n + 1);
        return w;
    }

    double kkt_residual(const StaticProblem &p, const Weights &w)
    {
        const Vector r = p.Sigma * w.omega - w.lambda1 * Vector::Ones(p.mu.size()) - w.lambda2 * p.mu;
        return r.cwiseAbs().maxCoeff();
    }
}
