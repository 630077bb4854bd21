#pragma once

#include <stdexcept>
#include <string>

namespace cspgap {

// Malformed or inconsistent caller input.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or dense-table cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A player broke the communication rules (message too long, ...).
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on an event of probability zero.
class NullEvent : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

}  // namespace cspgap
