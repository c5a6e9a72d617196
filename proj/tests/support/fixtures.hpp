#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "snipfix/source_text.hpp"

namespace snipfix::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(SNIPFIX_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture_bytes(const std::string& name) {
  std::ifstream file(fixture_path(name), std::ios::binary);
  if (!file) throw std::runtime_error("missing fixture: " + name);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

inline SourceText fixture(const std::string& name) {
  return SourceText::from_bytes(fixture_bytes(name));
}

}  // namespace snipfix::testing
