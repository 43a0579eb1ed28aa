#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phi {

// Raised by the parser. `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": syntax error: " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

enum class ErrorKind {
  kAttributeNotFound,
  kParentOfRoot,
  kMissingDecoratee,
  kUnboundParam,
  kTooManyArguments,
  kWrongArity,
  kDivisionByZero,
  kIntegerOverflow,
  kTypeMismatch,
  kUninitializedMemory,
  kEmptyCage,
  kIndexOutOfRange,
  kEscapingSignal,
  kDeadToken,
  kHeapOutOfCapacity,
  kHeapDoubleFree,
  kHeapUseAfterFree,
  kHeapOutOfBounds,
  kHeapUnmapped,
  kBadFormat,
  kStringTooLong,
  kDecoderArity,
  kBadArgument,
  kUnknownName,
  kRecursionDepth,
  kNoNativeImplementation,
  kUserError,
};

std::string_view error_kind_name(ErrorKind kind);

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(long long steps)
      : std::runtime_error("budget exhausted after " + std::to_string(steps) + " dataization steps"),
        steps_(steps) {}

  long long steps() const { return steps_; }

 private:
  long long steps_;
};

}  // namespace phi
