#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wreach {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid measure, plan or field construction input.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its admissible range (eps <= 0, b <= a, budget 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite state during time stepping.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace wreach
