#ifndef KICKCAST_ERROR_HPP
#define KICKCAST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace kickcast {

// Bad or inconsistent input data (files, CLI arguments, preconditions).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A violated internal invariant. Reaching this is a bug, not a data problem.
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace kickcast

#endif
