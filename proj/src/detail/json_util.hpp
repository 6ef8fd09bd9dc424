// Copyright 2026 The convsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "convsim/error.hpp"

namespace convsim::detail {

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("invalid JSON: ") + e.what());
  }
}

inline const nlohmann::json& require_field(const nlohmann::json& obj,
                                           const char* key,
                                           const std::string& path) {
  if (!obj.is_object()) fail(ErrorKind::kSchema, path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorKind::kSchema, path + "." + key + ": missing required field");
  }
  return *it;
}

template <typename T>
bool holds(const nlohmann::json& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v.is_string();
  } else if constexpr (std::is_same_v<T, bool>) {
    return v.is_boolean();
  } else if constexpr (std::is_floating_point_v<T>) {
    return v.is_number();
  } else if constexpr (std::is_unsigned_v<T>) {
    return v.is_number_unsigned() ||
           (v.is_number_integer() && v.get<long long>() >= 0);
  } else if constexpr (std::is_integral_v<T>) {
    return v.is_number_integer();
  } else {
    return true;
  }
}

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require_field(obj, key, path);
  if (!holds<T>(v)) {
    fail(ErrorKind::kSchema, path + "." + key + ": wrong type");
  }
  return v.get<T>();
}

template <typename T>
std::optional<T> optional(const nlohmann::json& obj, const char* key,
                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!holds<T>(*it)) {
    fail(ErrorKind::kSchema, path + "." + key + ": wrong type");
  }
  return it->get<T>();
}

}  // namespace convsim::detail
