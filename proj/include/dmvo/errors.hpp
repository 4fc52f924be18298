#pragma once

#include <stdexcept>
#include <string>

namespace dmvo
{
    /// Base of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Bad argument value (negative price, t outside [0, T], base <= 0, ...).
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    /// Evaluation time outside [0, T].
    class HorizonError : public DomainError
    {
    public:
        using DomainError::DomainError;
    };

    /// Covariance or correlation matrix failed a definiteness test.
    class DefinitenessError : public Error
    {
    public:
        DefinitenessError(const std::string &what, std::size_t pivot)
            : Error(what), pivot_(pivot) {}

        std::size_t pivot() const noexcept { return pivot_; }

    private:
        std::size_t pivot_;
    };

    /// Linear system or frontier is degenerate (ac - b^2 ~ 0, singular KKT matrix).
    class SingularError : public Error
    {
    public:
        using Error::Error;
    };

    /// Monte Carlo paths absorbed too often for the estimate to be trusted.
    class InstabilityError : public Error
    {
    public:
        using Error::Error;
    };

    /// Malformed or inconsistent input data. Carries a 1-based line number when known (0 otherwise).
    class DataError : public Error
    {
    public:
        explicit DataError(const std::string &what, std::size_t line = 0)
            : Error(what), line_(line) {}

        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    /// Not enough history for the rolling estimator.
    class WarmupError : public Error
    {
    public:
        using Error::Error;
    };

    /// Input violates a structural protocol (e.g. non-uniform time grid).
    class ProtocolError : public Error
    {
    public:
        using Error::Error;
    };

    /// Request exceeds a hard resource limit.
    class ResourceError : public Error
    {
    public:
        using Error::Error;
    };
}
