#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phi {

using Bytes = std::vector<std::uint8_t>;

// Terminal result of dataization.
class DataValue {
 public:
  using Storage = std::variant<std::int64_t, double, std::string, bool, Bytes>;

  DataValue() : value_(false) {}
  DataValue(std::int64_t v) : value_(v) {}
  DataValue(int v) : value_(static_cast<std::int64_t>(v)) {}
  DataValue(double v) : value_(v) {}
  DataValue(std::string v) : value_(std::move(v)) {}
  DataValue(const char* v) : value_(std::string(v)) {}
  DataValue(bool v) : value_(v) {}
  DataValue(Bytes v) : value_(std::move(v)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_float() const { return std::holds_alternative<double>(value_); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_bytes() const { return std::holds_alternative<Bytes>(value_); }
  bool is_number() const { return is_int() || is_float(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_float() const { return std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }
  const Bytes& as_bytes() const { return std::get<Bytes>(value_); }

  // Numeric value with int promoted to double.
  double to_double() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  // "Int", "Float", "String", "Bool" or "Bytes".
  std::string_view type_name() const;

  // Human rendering used by as-string and stdout. Floats use the shortest
  // round-trip decimal and always carry a decimal point or exponent.
  std::string render() const;

  // Source-literal rendering (strings quoted and escaped).
  std::string literal() const;

  const Storage& storage() const { return value_; }

  friend bool operator==(const DataValue& a, const DataValue& b) { return a.value_ == b.value_; }

 private:
  Storage value_;
};

std::string format_double(double v);
std::string quote_string(std::string_view s);

}  // namespace phi
