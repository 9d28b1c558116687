#include "simion/value.hpp"

#include <charconv>
#include <cmath>

namespace simion {

namespace {

void append_float(std::string& out, double d) {
  if (std::isnan(d)) {
    out += "nan";
    return;
  }
  if (d == 0.0) d = 0.0;  // normalizes -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  out.append(buf, end);
}

}  // namespace

void append_canonical(std::string& out, const Value& v) {
  const auto& s = v.storage();
  if (std::holds_alternative<Unset>(s)) {
    out += "unset";
  } else if (v.is_int()) {
    out += std::to_string(v.as_int());
  } else if (v.is_float()) {
    out += 'f';
    append_float(out, v.as_float());
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_string()) {
    const std::string& str = v.as_string();
    out += 's';
    out += std::to_string(str.size());
    out += ':';
    out += str;
  } else if (v.is_array()) {
    const auto& items = v.as_array().items;
    out += '[';
    out += std::to_string(items.size());
    out += ';';
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += ',';
      append_canonical(out, items[i]);
    }
    out += ']';
  } else {
    const auto& fields = v.as_record().fields;
    out += '{';
    out += std::to_string(fields.size());
    out += ';';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      append_canonical(out, fields[i]);
    }
    out += '}';
  }
}

std::string canonical(const Value& v) {
  std::string out;
  append_canonical(out, v);
  return out;
}

bool values_equal(const Value& a, const Value& b) {
  if (a.storage().index() != b.storage().index()) return false;
  if (a.is_unset()) return true;
  if (a.is_int()) return a.as_int() == b.as_int();
  if (a.is_float()) {
    double x = a.as_float();
    double y = b.as_float();
    if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
    return x == y;
  }
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_string()) return a.as_string() == b.as_string();
  const std::vector<Value>& xs = a.is_array() ? a.as_array().items : a.as_record().fields;
  const std::vector<Value>& ys = b.is_array() ? b.as_array().items : b.as_record().fields;
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!values_equal(xs[i], ys[i])) return false;
  }
  return true;
}

std::string to_display(const Value& v) {
  if (v.is_unset()) return "<unset>";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_float()) {
    std::string out;
    double d = v.as_float();
    if (std::isnan(d)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    out.assign(buf, end);
    if (out.find_first_of(".en") == std::string::npos) out += ".0";
    return out;
  }
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_string()) {
    std::string out = "\"";
    for (char c : v.as_string()) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
      }
    }
    return out + "\"";
  }
  if (v.is_array()) {
    std::string out = "[";
    const auto& items = v.as_array().items;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += ", ";
      out += to_display(items[i]);
    }
    return out + "]";
  }
  const auto& r = v.as_record();
  std::string out = r.type + "{";
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_display(r.fields[i]);
  }
  return out + "}";
}

}  // namespace simion
