#pragma once

#include <stdexcept>
#include <string>

namespace agentrec {

enum class ErrorKind {
  InvalidUtterance,
  StateDesync,
  InvalidConfig,
  InvalidContext,
  NumericError,
  NotFound,
};

const char* to_string(ErrorKind kind);

/// Base for every error raised by the engine. Callers that only need the
/// category (the HTTP layer maps it to a status code) can switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define AGENTREC_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& message)                        \
        : Error(ErrorKind::Name, std::string(#Name ": ") + message) {} \
  }

AGENTREC_DEFINE_ERROR(InvalidUtterance);
AGENTREC_DEFINE_ERROR(StateDesync);
AGENTREC_DEFINE_ERROR(InvalidConfig);
AGENTREC_DEFINE_ERROR(InvalidContext);
AGENTREC_DEFINE_ERROR(NumericError);
AGENTREC_DEFINE_ERROR(NotFound);

#undef AGENTREC_DEFINE_ERROR

}  // namespace agentrec
