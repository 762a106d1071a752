//---------------------------------------------------------------------------//
/*!
 * \file knt/error.hpp
 * \brief Exception types shared by all modules.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>

namespace knt
{
//! Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Malformed argument (bad count, non-unit vector, ...).
class ArgumentError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Invalid or inconsistent configuration.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A documented precondition on the data does not hold.
class PreconditionError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Requested combination is not supported by this implementation.
class UnsupportedError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Iterative or direct solve failed to meet its contract.
class NumericalError : public std::runtime_error
{
  public:
    NumericalError(std::string const& what, double achieved)
        : std::runtime_error(what), achieved_(achieved)
    {
    }
    explicit NumericalError(std::string const& what)
        : NumericalError(what, 0.0)
    {
    }

    //! Residual or condition estimate reached before failure
    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

}  // namespace knt
