#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace platoon {

/// Scenario/config problem, tagged with the `section.key` it came from.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string location, const std::string& message)
        : std::runtime_error(location + ": " + message), location_(std::move(location)) {}

    const std::string& location() const { return location_; }

private:
    std::string location_;
};

/// Closed-loop state left the representable range (divergent simulation).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File or stream failure, including malformed CSV input.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace platoon
