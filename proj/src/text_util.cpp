#include "vrtestlint/text_util.hpp"

#include <algorithm>
#include <cctype>

namespace vrtestlint {

namespace {

bool is_ident_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

std::string simple_type_name(std::string_view type) {
  type = trim(type);
  if (const auto cut = type.find_first_of("<[?*"); cut != std::string_view::npos) {
    type = type.substr(0, cut);
  }
  type = trim(type);
  if (const auto dot = type.find_last_of(".:"); dot != std::string_view::npos) {
    type = type.substr(dot + 1);
  }
  type = trim(type);
  if (!type.empty() && type.front() == '@') type.remove_prefix(1);
  return std::string(type);
}

bool contains_identifier(std::string_view text, std::string_view name) {
  if (name.empty()) return false;
  for (auto pos = text.find(name); pos != std::string_view::npos; pos = text.find(name, pos + 1)) {
    const bool left = pos == 0 || !is_ident_char(text[pos - 1]);
    const auto end = pos + name.size();
    const bool right = end == text.size() || !is_ident_char(text[end]);
    if (left && right) return true;
  }
  return false;
}

std::string remove_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

std::string file_stem(std::string_view path) {
  if (const auto slash = path.find_last_of("/\\"); slash != std::string_view::npos) {
    path = path.substr(slash + 1);
  }
  if (const auto dot = path.rfind('.'); dot != std::string_view::npos && dot > 0) {
    path = path.substr(0, dot);
  }
  return std::string(path);
}

}  // namespace vrtestlint
