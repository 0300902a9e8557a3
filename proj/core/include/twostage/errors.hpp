#pragma once

#include <stdexcept>
#include <string>

namespace twostage {

// A caller broke an operation's documented precondition (as opposed to passing
// a malformed argument, which raises std::invalid_argument).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal state no longer satisfies a type invariant, e.g. a posterior lost
// positive definiteness.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twostage
