#ifndef NSD_ERRORS_HPP
#define NSD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nsd {

// Precondition or invariant violation by the caller.
struct ContractError : std::invalid_argument {
  explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed file contents (bad magic, truncation, invalid values).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / stream failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value produced where finiteness is required.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nsd

#endif  // NSD_ERRORS_HPP
