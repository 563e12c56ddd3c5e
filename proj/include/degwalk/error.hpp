#pragma once

#include <stdexcept>
#include <string>

namespace degwalk {

// Bad user input: unreadable files, malformed lines, invalid parameters.
// The CLI maps this to exit code 2 and everything else to 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace degwalk
