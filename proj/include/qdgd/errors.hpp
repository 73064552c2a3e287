#pragma once

#include <stdexcept>
#include <string>

namespace qdgd {

// Bad inputs: parameters, configuration files, datasets. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric or contract failures discovered while computing. The CLI maps these to exit code 3.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class ConstructionError : public InputError {
 public:
  using InputError::InputError;
};

class DataError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class ContractError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class NumericError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class RangeError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class ConvergenceError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace qdgd
