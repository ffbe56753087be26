#pragma once

#include <stdexcept>
#include <string>

namespace slslab {

/// A controller or model parameter lies outside its admissible domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An analytic routine was asked for a case its formula does not cover
/// (e.g. the coupled closed form with zero coupling).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Leverage cap requested on an account with nonpositive value.
class BankruptAccountError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical results disagree with an identity they must satisfy.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slslab
