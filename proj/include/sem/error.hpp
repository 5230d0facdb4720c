#pragma once

#include <stdexcept>
#include <string>

namespace sem {

/// Failure categories. The CLI maps `io` and `parse` to exit code 2 and
/// everything else to exit code 1.
enum class ErrorKind {
  domain,              // argument outside the admissible set
  degenerate,          // conditioning on a certain event, l(0)=0, ...
  monotonicity,        // data violate a required ordering
  parse,
  io,
  data_gap,
  underdetermined,
  not_applicable,      // e.g. modification requested for an unsupported cohort
  invariant,           // internal numerical invariant broken
  validation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sem
