#include "phi/data.hpp"

#include <charconv>
#include <cmath>

#include "phi/errors.hpp"

namespace phi {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string_view DataValue::type_name() const {
  switch (value_.index()) {
    case 0: return "Int";
    case 1: return "Float";
    case 2: return "String";
    case 3: return "Bool";
    default: return "Bytes";
  }
}

std::string DataValue::render() const {
  if (is_int()) return std::to_string(as_int());
  if (is_float()) return format_double(as_float());
  if (is_string()) return as_string();
  if (is_bool()) return as_bool() ? "TRUE" : "FALSE";
  const Bytes& b = as_bytes();
  std::string out;
  for (std::uint8_t c : b) {
    if (c == 0) break;
    out += static_cast<char>(c);
  }
  return out;
}

std::string DataValue::literal() const {
  if (is_string()) return quote_string(as_string());
  if (is_bytes()) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (std::uint8_t c : as_bytes()) {
      if (!out.empty()) out += '-';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
    return out.empty() ? "--" : out;
  }
  return render();
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAttributeNotFound: return "attribute-not-found";
    case ErrorKind::kParentOfRoot: return "parent-of-root";
    case ErrorKind::kMissingDecoratee: return "missing-decoratee";
    case ErrorKind::kUnboundParam: return "unbound-parameter";
    case ErrorKind::kTooManyArguments: return "too-many-arguments";
    case ErrorKind::kWrongArity: return "wrong-arity";
    case ErrorKind::kDivisionByZero: return "division-by-zero";
    case ErrorKind::kIntegerOverflow: return "integer-overflow";
    case ErrorKind::kTypeMismatch: return "type-mismatch";
    case ErrorKind::kUninitializedMemory: return "read-before-write";
    case ErrorKind::kEmptyCage: return "empty-cage";
    case ErrorKind::kIndexOutOfRange: return "index-out-of-range";
    case ErrorKind::kEscapingSignal: return "escaping-signal";
    case ErrorKind::kDeadToken: return "dead-token";
    case ErrorKind::kHeapOutOfCapacity: return "heap-out-of-capacity";
    case ErrorKind::kHeapDoubleFree: return "double-free";
    case ErrorKind::kHeapUseAfterFree: return "use-after-free";
    case ErrorKind::kHeapOutOfBounds: return "out-of-bounds";
    case ErrorKind::kHeapUnmapped: return "unmapped-address";
    case ErrorKind::kBadFormat: return "bad-format";
    case ErrorKind::kStringTooLong: return "string-too-long";
    case ErrorKind::kDecoderArity: return "decoder-arity";
    case ErrorKind::kBadArgument: return "bad-argument";
    case ErrorKind::kUnknownName: return "unknown-name";
    case ErrorKind::kRecursionDepth: return "recursion-depth";
    case ErrorKind::kNoNativeImplementation: return "no-native-implementation";
    case ErrorKind::kUserError: return "error";
  }
  return "error";
}

}  // namespace phi
