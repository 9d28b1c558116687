#pragma once

// Runtime values of MiniLang and their canonical serialization.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace simion {

class Value;

struct ArrayValue {
  std::vector<Value> items;
};

struct RecordValue {
  std::string type;
  std::vector<Value> fields;  // declaration order
};

/// Declared but not yet assigned (return slot, write-only outputs).
struct Unset {};

class Value {
 public:
  using Storage =
      std::variant<Unset, std::int64_t, double, bool, std::string, ArrayValue, RecordValue>;

  Value() = default;
  Value(std::int64_t v) : data_(v) {}
  Value(double v) : data_(v) {}
  Value(bool v) : data_(v) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(ArrayValue v) : data_(std::move(v)) {}
  Value(RecordValue v) : data_(std::move(v)) {}

  bool is_unset() const { return std::holds_alternative<Unset>(data_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_array() const { return std::holds_alternative<ArrayValue>(data_); }
  bool is_record() const { return std::holds_alternative<RecordValue>(data_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }
  std::string& as_string() { return std::get<std::string>(data_); }
  const ArrayValue& as_array() const { return std::get<ArrayValue>(data_); }
  ArrayValue& as_array() { return std::get<ArrayValue>(data_); }
  const RecordValue& as_record() const { return std::get<RecordValue>(data_); }
  RecordValue& as_record() { return std::get<RecordValue>(data_); }

  const Storage& storage() const { return data_; }

 private:
  Storage data_;
};

/// Canonical text form used for fingerprints: ints in decimal, floats as
/// `f` + shortest round-trip decimal (-0 printed as 0), strings
/// length-prefixed, arrays and records structural with record type names
/// erased.
std::string canonical(const Value& v);
void append_canonical(std::string& out, const Value& v);

/// Structural equality in the sense of `canonical`: -0.0 equals 0.0, NaN
/// equals NaN, record type names are ignored.
bool values_equal(const Value& a, const Value& b);

/// Human-readable MiniLang literal syntax.
std::string to_display(const Value& v);

}  // namespace simion
