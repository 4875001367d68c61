#ifndef STRUCTRTL_UTIL_ERROR_H_
#define STRUCTRTL_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace structrtl {

// Root of every recoverable failure raised by the toolchain. The CLI maps
// any Error escaping a subcommand to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}

  // JSON pointer (RFC 6901) of the offending value.
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace structrtl

#endif  // STRUCTRTL_UTIL_ERROR_H_
