#pragma once

#include <stdexcept>
#include <string>

namespace loraadv {

/// Raised when a configuration value violates a documented invariant.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an operation receives data of the wrong shape or kind.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace loraadv
