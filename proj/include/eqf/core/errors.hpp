#pragma once

#include <stdexcept>
#include <string>

namespace eqf {

/// The local error left the region where the chart is a valid coordinate
/// system. Usually means the filter step or the correction was too large.
class ChartDomainError : public std::domain_error {
  public:
    explicit ChartDomainError(const std::string& what) : std::domain_error(what) {}
};

/// A covariance or noise matrix was not symmetric positive definite.
class NotPositiveDefiniteError : public std::invalid_argument {
  public:
    explicit NotPositiveDefiniteError(const std::string& what) : std::invalid_argument(what) {}
};

/// Analytic Jacobian disagrees with its finite-difference cross-check.
class JacobianMismatchError : public std::logic_error {
  public:
    explicit JacobianMismatchError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace eqf
