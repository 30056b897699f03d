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

#include "reasoneval/vocab.hpp"

#include "assets.hpp"
#include "reasoneval/error.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

std::string normalize_label(std::string_view label) {
  return detail::to_lower(detail::collapse_spaces(detail::trim(label)));
}

LabelTask LabelVocabulary::task_from_json(const json& j) {
  LabelTask t;
  try {
    t.task = j.at("task").get<std::string>();
    t.question = j.value("question", "");
    t.labels = j.at("labels").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("label task: ") + e.what());
  }
  if (t.labels.empty()) throw ConfigError("label task " + t.task + ": no labels");
  return t;
}

LabelVocabulary LabelVocabulary::from_tasks(std::vector<LabelTask> tasks) {
  LabelVocabulary v;
  v.tasks_ = std::move(tasks);
  for (const auto& t : v.tasks_) {
    for (const auto& l : t.labels) v.by_norm_.emplace(normalize_label(l), l);
  }
  return v;
}

const LabelVocabulary& LabelVocabulary::builtin() {
  static const LabelVocabulary v = [] {
    std::vector<LabelTask> tasks;
    for (const auto& [name, text] : detail::asset_table()) {
      if (name.rfind("vocab/", 0) == 0) tasks.push_back(task_from_json(json::parse(text)));
    }
    return from_tasks(std::move(tasks));
  }();
  return v;
}

const LabelTask* LabelVocabulary::task(std::string_view name) const {
  for (const auto& t : tasks_) {
    if (t.task == name) return &t;
  }
  return nullptr;
}

bool LabelVocabulary::contains(std::string_view label) const { return by_norm_.count(normalize_label(label)) != 0; }

std::optional<std::string> LabelVocabulary::canonical(std::string_view label) const {
  auto it = by_norm_.find(normalize_label(label));
  if (it == by_norm_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> LabelVocabulary::all_labels() const {
  std::vector<std::string> out;
  for (const auto& [norm, label] : by_norm_) out.push_back(label);
  return out;
}

}  // namespace reasoneval
