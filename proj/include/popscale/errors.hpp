#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace popscale {

// Invalid problem definition or operator configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed instance file or report document.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A state-space or enumeration cap would be exceeded.
class CapExceeded : public std::runtime_error {
public:
  CapExceeded(const std::string& what, std::uint64_t required, std::uint64_t cap)
      : std::runtime_error(what), required(required), cap(cap) {}
  std::uint64_t required;
  std::uint64_t cap;
};

// I - Q is singular: the chain cannot reach the optimal set from somewhere.
class NonConvergentError : public std::runtime_error {
public:
  explicit NonConvergentError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace popscale
