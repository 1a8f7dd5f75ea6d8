#pragma once

#include <stdexcept>
#include <string>

namespace rpcs {

// Error taxonomy. Every throw from this library is one of these four, so
// callers (the C API, the CLI) can map failures to stable codes without
// string matching.
enum class ErrorKind {
  invalid_argument,  // caller broke a precondition (shapes, ranges, enums)
  data,              // input data unusable (constant column, degenerate response)
  numeric,           // factorization breakdown or non-finite intermediate
  config,            // malformed plan / settings document
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_invalid(std::string msg) {
  throw Error(ErrorKind::invalid_argument, std::move(msg));
}
[[noreturn]] inline void fail_data(std::string msg) {
  throw Error(ErrorKind::data, std::move(msg));
}
[[noreturn]] inline void fail_numeric(std::string msg) {
  throw Error(ErrorKind::numeric, std::move(msg));
}
[[noreturn]] inline void fail_config(std::string msg) {
  throw Error(ErrorKind::config, std::move(msg));
}

}  // namespace rpcs
