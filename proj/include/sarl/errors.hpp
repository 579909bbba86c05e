#pragma once

#include <stdexcept>
#include <string>

namespace sarl {

/// Input/filter shapes disagree (channel counts, train lengths, mask sizes).
class StructuralError : public std::invalid_argument {
 public:
  explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid experiment or topology configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// API called in a state where it is not allowed (e.g. stepping a finished episode).
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sarl
