#include "dmvo/errors.hpp"
#include "dmvo/static_mvo.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace dmvo;
using namespace dmvo::static_mvo;

namespace
{
    StaticProblem identity_problem(double target)
    {
        StaticProblem p;
        p.mu = Vector(2);
        p.mu << 0.1, 0.2;
        p.Sigma = Matrix::Identity(2, 2);
        p.target = target;
        return p;
    }

    StaticProblem random_problem(int n, std::mt19937_64 &rng)
    {
        StaticProblem p;
        p.mu = test::random_vector(n, rng);
        p.Sigma = test::random_pd(n, rng);
        p.target = std::uniform_real_distribution<double>(-0.1, 0.4)(rng);
        return p;
    }
}

TEST_CASE("frontier constants: identity covariance")
{
    const auto fc = frontier_constants(identity_problem(0.15));
    CHECK(fc.a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fc.b == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fc.c == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(fc.determinant() == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("frontier constants: single asset is degenerate")
{
    StaticProblem p;
    p.mu = Vector::Constant(1, 0.08);
    p.Sigma = Matrix::Constant(1, 1, 0.04);
    const auto fc = frontier_constants(p);
    CHECK(fc.a == doctest::Approx(25.0));
    CHECK(fc.b == doctest::Approx(2.0));
    CHECK(fc.c == doctest::Approx(0.16));
    CHECK(std::abs(fc.determinant()) < 1e-12);
}

TEST_CASE("frontier constants match an independently factorized inverse")
{
    std::mt19937_64 rng(11);
    const auto p = random_problem(4, rng);
    // Oracle: LU inverse, unrelated to the Cholesky path used by the library.
    const Matrix inv = Eigen::PartialPivLU<Matrix>(p.Sigma).inverse();
    const Vector ones = Vector::Ones(4);
    const auto fc = frontier_constants(p);
    CHECK(std::abs(fc.a - ones.dot(inv * ones)) < 1e-10);
    CHECK(std::abs(fc.b - ones.dot(inv * p.mu)) < 1e-10);
    CHECK(std::abs(fc.c - p.mu.dot(inv * p.mu)) < 1e-10);
}

TEST_CASE("non-positive-definite covariance names the failing pivot")
{
    StaticProblem p;
    p.mu = Vector(3);
    p.mu << 0.1, 0.2, 0.3;
    p.Sigma = Matrix::Identity(3, 3);
    p.Sigma(2, 2) = -1.0;
    try
    {
        frontier_constants(p);
        FAIL("expected DefinitenessError");
    }
    catch (const DefinitenessError &e)
    {
        CHECK(e.pivot() == 2);
    }

    p.Sigma = Matrix::Identity(3, 3);
    p.Sigma(0, 1) = 0.5;
    CHECK_THROWS_AS(frontier_constants(p), DomainError);
}

TEST_CASE("closed form: worked examples")
{
    const auto w = solve_static_mvo(identity_problem(0.15));
    CHECK(w.omega(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w.omega(1) == doctest::Approx(0.5).epsilon(1e-14));

    StaticProblem one;
    one.mu = Vector::Constant(1, 0.07);
    one.Sigma = Matrix::Constant(1, 1, 0.09);
    one.target = 0.07;
    CHECK(solve_static_mvo(one).omega(0) == 1.0);
    one.target = 0.08;
    CHECK_THROWS_AS(solve_static_mvo(one), SingularError);
}

TEST_CASE("closed form agrees with the KKT oracle on a 3-asset instance")
{
    std::mt19937_64 rng(3);
    const auto p = random_problem(3, rng);
    const auto closed = solve_static_mvo(p);
    const auto oracle = kkt_oracle(p);
    CHECK((closed.omega - oracle.omega).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(closed.lambda1 - oracle.lambda1) < 1e-9);
    CHECK(std::abs(closed.lambda2 - oracle.lambda2) < 1e-9);
    CHECK(kkt_residual(p, closed) < 1e-10);
}

TEST_CASE("frontier variance")
{
    const auto p = identity_problem(0.15);
    const auto fc = frontier_constants(p);
    CHECK(frontier_variance(fc, 0.15) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(frontier_variance(fc, fc.min_variance_return()) == doctest::Approx(1.0 / fc.a).epsilon(1e-12));

    std::mt19937_64 rng(5);
    const auto q = random_problem(3, rng);
    const auto w = solve_static_mvo(q);
    CHECK(std::abs(frontier_variance(frontier_constants(q), q.target) - w.omega.dot(q.Sigma * w.omega)) < 1e-10);
}

TEST_CASE("KKT oracle: examples and singular system")
{
    const auto w = kkt_oracle(identity_problem(0.15));
    CHECK(w.omega(0) == doctest::Approx(0.5));
    CHECK(w.omega(1) == doctest::Approx(0.5));

    StaticProblem same;
    same.mu = Vector::Constant(2, 0.1);
    same.Sigma = Matrix::Identity(2, 2);
    same.target = 0.1;
    CHECK_THROWS_AS(kkt_oracle(same), SingularError);
    CHECK_THROWS_AS(solve_static_mvo(same), SingularError);

    std::mt19937_64 rng(8);
    const auto q = random_problem(5, rng);
    CHECK((kkt_oracle(q).omega - solve_static_mvo(q).omega).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("properties over random instances")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int n = 2 + trial % 9;
        const auto p = random_problem(n, rng);
        const auto w = solve_static_mvo(p);
        const auto fc = frontier_constants(p);

        CHECK(std::abs(w.omega.sum() - 1.0) <= 1e-10);
        CHECK(std::abs(w.omega.dot(p.mu) - p.target) <= 1e-10);
        CHECK((w.omega - kkt_oracle(p).omega).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(std::abs(frontier_variance(fc, p.target) - w.omega.dot(p.Sigma * w.omega)) <= 1e-10);
        CHECK(fc.a > 0.0);
        CHECK(fc.c >= 0.0);
        CHECK(fc.determinant() > 0.0);

        // Monotone above the minimum-variance return.
        const double t0 = fc.min_variance_return();
        double prev = frontier_variance(fc, t0);
        for (int k = 1; k <= 10; ++k)
        {
            const double v = frontier_variance(fc, t0 + 0.05 * k);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("optimality against feasible perturbations")
{
    std::mt19937_64 rng(99);
    const auto p = random_problem(6, rng);
    const auto w = solve_static_mvo(p);
    const double best = w.omega.dot(p.Sigma * w.omega);

    // Perturbations in the null space of [1^T; mu^T] keep both constraints.
    Matrix constraints(2, 6);
    constraints.row(0) = Vector::Ones(6).transpose();
    constraints.row(1) = p.mu.transpose();
    const Matrix null = Eigen::FullPivLU<Matrix>(constraints).kernel();
    std::normal_distribution<double> z(0.0, 1.0);
    for (int k = 0; k < 50; ++k)
    {
        Vector coef(null.cols());
        for (Eigen::Index j = 0; j < coef.size(); ++j)
            coef(j) = z(rng);
        const Vector other = w.omega + null * coef;
        CHECK(std::abs(other.sum() - 1.0) < 1e-9);
        CHECK(other.dot(p.Sigma * other) >= best - 1e-12);
    }
}
