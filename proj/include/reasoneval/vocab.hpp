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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace reasoneval {

// Lowercase with whitespace collapsed; the form labels are compared in.
std::string normalize_label(std::string_view label);

struct LabelTask {
  std::string task;
  std::string question;  // empty for classification tasks
  std::vector<std::string> labels;
};

// Diagnosis label sets, one per evaluation task.
class LabelVocabulary {
 public:
  static LabelVocabulary from_tasks(std::vector<LabelTask> tasks);
  // Throws ConfigError on a malformed task document.
  static LabelTask task_from_json(const nlohmann::json& j);
  static const LabelVocabulary& builtin();

  const std::vector<LabelTask>& tasks() const { return tasks_; }
  const LabelTask* task(std::string_view name) const;
  bool contains(std::string_view label) const;
  // The vocabulary's spelling of a label, or nullopt when unknown.
  std::optional<std::string> canonical(std::string_view label) const;
  std::vector<std::string> all_labels() const;

 private:
  std::vector<LabelTask> tasks_;
  std::map<std::string, std::string> by_norm_;
};

}  // namespace reasoneval
