// Copyright 2026 The ReasonEval Authors
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

#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reasoneval/error.hpp"

namespace reasoneval::detail {

// Data files compiled into the library, keyed by path under data/.
const std::map<std::string, std::string_view>& asset_table();

inline std::string_view asset(const std::string& name) {
  const auto& t = asset_table();
  auto it = t.find(name);
  if (it == t.end()) throw IoError("no embedded asset '" + name + "'");
  return it->second;
}

inline nlohmann::json asset_json(const std::string& name) { return nlohmann::json::parse(asset(name)); }

}  // namespace reasoneval::detail
