#pragma once

#include <stdexcept>
#include <string>

namespace mvcorr {

/// Raised when a caller breaks an operation's precondition (shape, range, finiteness).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace mvcorr
