#pragma once

#include <stdexcept>
#include <string>

namespace radonseis {

// Numerical / usage failure inside the library (CLI exit code 1).
class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or artifact file (CLI exit code 2).
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace radonseis
