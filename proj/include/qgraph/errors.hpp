#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

// Malformed input: graph files, dangling ids, bad flag values. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its contract (missing root, vertex of the
// wrong type, part that does not meet the rest in one vertex, ...).
class PreconditionError : public InputError {
 public:
  explicit PreconditionError(const std::string& what) : InputError(what) {}
};

// The computation itself failed: step underflow, ill-conditioned fit,
// consistency gate violated. CLI exit code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qgraph
