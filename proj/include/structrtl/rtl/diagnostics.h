#ifndef STRUCTRTL_RTL_DIAGNOSTICS_H_
#define STRUCTRTL_RTL_DIAGNOSTICS_H_

#include <string>

#include "structrtl/util/error.h"

namespace structrtl::rtl {

struct SourceLoc {
  int line = 1;
  int column = 1;
};

// Frontend failure with a 1-based source position. what() is
// "line:column: message" so callers can prefix the file name.
class FrontendError : public Error {
 public:
  FrontendError(SourceLoc loc, const std::string& message)
      : Error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + message),
        loc_(loc),
        message_(message) {}

  int line() const { return loc_.line; }
  int column() const { return loc_.column; }
  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  SourceLoc loc_;
  std::string message_;
};

class LexError : public FrontendError {
 public:
  using FrontendError::FrontendError;
};

class ParseError : public FrontendError {
 public:
  ParseError(SourceLoc loc, std::string expected, std::string found)
      : FrontendError(loc, "expected " + expected + ", found " + found),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::string expected_;
  std::string found_;
};

class UnsupportedConstruct : public FrontendError {
 public:
  UnsupportedConstruct(SourceLoc loc, std::string name)
      : FrontendError(loc, "unsupported construct: " + name), name_(std::move(name)) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ElaborationError : public FrontendError {
 public:
  using FrontendError::FrontendError;
};

}  // namespace structrtl::rtl

#endif  // STRUCTRTL_RTL_DIAGNOSTICS_H_
