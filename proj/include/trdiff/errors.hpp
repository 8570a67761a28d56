#pragma once

#include <stdexcept>
#include <string>

namespace trdiff {

// Base for all library errors. `module()` names the component that raised it
// so the CLI can attribute failures.
class Error : public std::runtime_error {
public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

private:
  std::string module_;
};

// Precondition violated by a caller-supplied argument (off-shell momentum,
// forward-scattering angle, Nyquist violation, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Invalid or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Numerical breakdown during a computation (NaN, singular point hit).
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace trdiff
