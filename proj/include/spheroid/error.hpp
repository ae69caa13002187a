// Error taxonomy mirrored by the command-line exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace spheroid {

// Malformed input: bad config values, schema violations, domain errors. Exit code 2.
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical non-convergence: factorization failures, non-finite states. Exit code 3.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource limits: population hard cap and similar. Exit code 4.
class ResourceError : public std::runtime_error {
  public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spheroid
