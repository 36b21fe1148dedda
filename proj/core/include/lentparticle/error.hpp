#pragma once

#include <stdexcept>
#include <string>

namespace lp {

// Error categories map onto the CLI exit codes.
enum class ErrorKind {
  Domain,      // bad argument to a library call
  Schema,      // configuration does not validate
  Hypothesis,  // regularity assumption violated (e.g. singular I + D_x c)
  Numeric,     // overflow, divergence, singular matrix during a run
  Capability   // scenario cannot provide a requested object
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Capability: return "capability";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace lp
