#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrgan/common.hpp"

namespace corrgan {

// Strict object access: every present key must be known, every required key
// must be present. Unknown keys are config bugs, not extension points.
inline void expect_keys(const nlohmann::json& obj,
                        std::initializer_list<const char*> required,
                        std::initializer_list<const char*> optional,
                        const std::string& context) {
  if (!obj.is_object()) {
    throw InvalidSpec(context + ": expected a JSON object");
  }
  for (const char* k : required) {
    if (!obj.contains(k)) {
      throw InvalidSpec(context + ": missing required key \"" + k + "\"");
    }
  }
  for (const auto& [key, _] : obj.items()) {
    auto known = [&](std::initializer_list<const char*> list) {
      return std::any_of(list.begin(), list.end(),
                         [&](const char* k) { return key == k; });
    };
    if (!known(required) && !known(optional)) {
      throw InvalidSpec(context + ": unknown key \"" + key + "\"");
    }
  }
}

}  // namespace corrgan
