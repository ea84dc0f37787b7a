#pragma once

#include <stdexcept>
#include <string>

namespace qrc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: counts, ranges, shapes, malformed config or files.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Numerical failure at runtime: divergence, singular systems, NaN.
class NumericalError : public Error {
  public:
    using Error::Error;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string &msg) {
    throw ConfigError(msg);
}

[[noreturn]] inline void numeric_fail(const std::string &msg) {
    throw NumericalError(msg);
}

inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        config_fail(msg);
    }
}

} // namespace detail
} // namespace qrc
