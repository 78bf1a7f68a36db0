/*
 * Copyright 2026 The isaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Prompt templates and VQA question schema shipped with the occupation corpus.

#ifndef ISAUDIT_TEMPLATES_HPP_
#define ISAUDIT_TEMPLATES_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isaudit/core_model.hpp"
#include "isaudit/error.hpp"
#include "isaudit/io.hpp"

namespace isaudit {

inline constexpr char kTemplatesSchema[] = "bctemplates-v1";
inline constexpr char kVqaSchema[] = "bcvqa-v1";

struct PromptTemplates {
  std::string initial;  // contains "{occupation}"
  std::vector<std::string> occupations;
  std::vector<AxisSchema> axes;
  std::map<std::pair<std::string, std::string>, std::string> counterfactuals;

  std::string prompt(std::string_view occupation, const VariantKey& key) const {
    std::string text = initial;
    if (!key.is_init()) {
      auto it = counterfactuals.find({key.axis, key.attribute});
      if (it == counterfactuals.end()) {
        throw Error(ErrorKind::kUnknownVariant,
                    "no template for " + key.ToString());
      }
      text = it->second;
    }
    const std::string slot = "{occupation}";
    const auto pos = text.find(slot);
    if (pos != std::string::npos) text.replace(pos, slot.size(), occupation);
    return text;
  }
};

inline PromptTemplates PromptTemplatesFromJson(const Json& j,
                                               std::string_view where = "templates") {
  detail::CheckSchemaTag(j, kTemplatesSchema, where);
  PromptTemplates t;
  t.initial = detail::String(detail::Field(j, "initial_template", where), where);
  t.occupations = detail::Strings(detail::Field(j, "occupations", where), where);
  const Json& axes = detail::Field(j, "axes", where);
  if (!axes.is_array()) detail::FormatFail(where, "'axes' must be an array");
  for (const auto& ja : axes) {
    AxisSchema axis = AxisFromJson(ja, where);
    const Json& cf = detail::Field(ja, "counterfactuals", where);
    for (const auto& label : axis.attributes) {
      t.counterfactuals[{axis.name, label}] =
          detail::String(detail::Field(cf, label.c_str(), where), where);
    }
    t.axes.push_back(std::move(axis));
  }
  return t;
}

inline PromptTemplates load_prompt_templates(const std::filesystem::path& path) {
  return PromptTemplatesFromJson(ReadJsonFile(path), path.string());
}

// Answer choices per axis, plus the person-filter question.
struct VqaQuestions {
  std::string person_question;
  std::map<std::string, std::vector<std::string>> choices;
};

inline VqaQuestions VqaQuestionsFromJson(const Json& j,
                                         std::string_view where = "questions") {
  detail::CheckSchemaTag(j, kVqaSchema, where);
  VqaQuestions q;
  q.person_question = detail::String(
      detail::Field(detail::Field(j, "person_filter", where), "question", where),
      where);
  const Json& axes = detail::Field(j, "axes", where);
  if (!axes.is_array()) detail::FormatFail(where, "'axes' must be an array");
  for (const auto& ja : axes) {
    q.choices[detail::String(detail::Field(ja, "axis", where), where)] =
        detail::Strings(detail::Field(ja, "choices", where), where);
  }
  return q;
}

inline VqaQuestions load_vqa_questions(const std::filesystem::path& path) {
  return VqaQuestionsFromJson(ReadJsonFile(path), path.string());
}

// Every axis must be asked about, with choices equal to its attribute list.
inline void CheckQuestionsCoverAxes(const VqaQuestions& q,
                                    const std::vector<AxisSchema>& axes) {
  for (const auto& axis : axes) {
    auto it = q.choices.find(axis.name);
    if (it == q.choices.end()) {
      throw Error(ErrorKind::kUnknownAxis, "no question for axis '" + axis.name + "'");
    }
    if (it->second != axis.attributes) {
      throw Error(ErrorKind::kSchemaMismatch,
                  "choices for '" + axis.name + "' differ from its attributes");
    }
  }
}

}  // namespace isaudit

#endif  // ISAUDIT_TEMPLATES_HPP_
