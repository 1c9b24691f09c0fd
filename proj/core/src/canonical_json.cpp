#include "canonical_json.hpp"

#include <cmath>

#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::detail {
namespace {

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void dump(const Json& v, bool pretty, int depth, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        if (pretty) {
          out.push_back('\n');
          indent(out, depth + 1);
        }
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
        out += pretty ? ": " : ":";
        dump(it.value(), pretty, depth + 1, out);
      }
      if (pretty) {
        out.push_back('\n');
        indent(out, depth);
      }
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        if (pretty) {
          out.push_back('\n');
          indent(out, depth + 1);
        }
        dump(item, pretty, depth + 1, out);
      }
      if (pretty) {
        out.push_back('\n');
        indent(out, depth);
      }
      out.push_back(']');
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        throw Error(ErrorCode::kParseError, "non-finite number cannot be serialized");
      }
      out += text::format_double(d);
      return;
    }
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
      return;
  }
}

}  // namespace

std::string canonical_dump(const Json& value, bool pretty) {
  std::string out;
  dump(value, pretty, 0, out);
  if (pretty) out.push_back('\n');
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object()) throw Error(ErrorCode::kParseError, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kParseError, std::string("missing field ") + key);
  return *it;
}

std::string get_string(const Json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw Error(ErrorCode::kParseError, std::string(key) + " must be a string");
  return v.get<std::string>();
}

double get_double(const Json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number()) throw Error(ErrorCode::kParseError, std::string(key) + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const Json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::kParseError, std::string(key) + " must be an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const Json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::kParseError, std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_boolean()) throw Error(ErrorCode::kParseError, std::string(key) + " must be a bool");
  return v.get<bool>();
}

}  // namespace tabaudit::detail
