#pragma once

#include <stdexcept>
#include <string>

namespace hsl {

// Bad user-facing parameters (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A hard resource cap was hit (CLI exit code 3).
class ResourceCapError : public std::runtime_error {
 public:
  explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsl
