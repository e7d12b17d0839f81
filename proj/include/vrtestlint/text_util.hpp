#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vrtestlint {

bool iequals(std::string_view a, std::string_view b);

std::string_view trim(std::string_view text);

/// `System.Collections.Generic.List<int>[]` -> `List`.
std::string simple_type_name(std::string_view type);

/// Whether `name` occurs in `text` as a whole identifier.
bool contains_identifier(std::string_view text, std::string_view name);

std::string remove_whitespace(std::string_view text);

std::string file_stem(std::string_view path);

}  // namespace vrtestlint
