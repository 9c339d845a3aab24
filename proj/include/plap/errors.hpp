#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Vector lengths disagree with the graph they are paired with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but the quantity is undefined for it
/// (constant function, isolated vertex, zero vector).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request would enumerate more than the configured budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed external input (files, relators of the wrong shape).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration is missing, malformed or inconsistent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace plap
