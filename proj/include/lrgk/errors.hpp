#pragma once

#include <stdexcept>
#include <string>

namespace lrgk {

// Bad user-provided data or arguments (CLI maps these to exit code 2).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// API misuse such as reusing a consumed tape.
struct state_error : std::logic_error {
  explicit state_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lrgk
