#pragma once

#include <string>

#include "json.hpp"

namespace tabaudit::detail {

using Json = nlohmann::json;

// Sorted keys (nlohmann's default object map), doubles as shortest
// round-trip decimals. pretty = two-space indent plus trailing newline.
std::string canonical_dump(const Json& value, bool pretty);

Json parse_json(std::string_view text);

// Typed field access that raises ParseError with the field name.
const Json& require(const Json& obj, const char* key);
std::string get_string(const Json& obj, const char* key);
double get_double(const Json& obj, const char* key);
std::int64_t get_int(const Json& obj, const char* key);
std::uint64_t get_uint(const Json& obj, const char* key);
bool get_bool(const Json& obj, const char* key);

}  // namespace tabaudit::detail
