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

#ifndef ISAUDIT_AGGREGATE_HPP_
#define ISAUDIT_AGGREGATE_HPP_

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "isaudit/core_model.hpp"
#include "isaudit/discovery.hpp"
#include "isaudit/error.hpp"

namespace isaudit {

// Records of many prompts merged variant by variant.
struct GlobalDataset {
  ValidatedDataset dataset;
  std::vector<std::string> provenance;  // contributing prompt ids, input order
  std::size_t dropped_no_person = 0;
};

inline constexpr char kGlobalPromptId[] = "global";

// Settings used for cross-prompt graphs: a stricter threshold because the
// merged tables are large, a floor on |IS|, and pooled counterfactual counts
// (the column sums of the merged contingency table).
inline AnalysisConfig GlobalConfig(AnalysisConfig base = {}) {
  base.p_value_threshold = 5e-5;
  base.min_abs_is = 0.03;
  base.pooling = InterventionPooling::kPool;
  return base;
}

// Concatenates per-prompt variant record lists. Image ids are prefixed with
// "<prompt_id>/" so they stay unique.
inline GlobalDataset aggregate_datasets(std::span<const ValidatedDataset> inputs) {
  if (inputs.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "nothing to aggregate");
  }
  AttributeDataset merged;
  merged.prompt_id = kGlobalPromptId;
  merged.axes = inputs.front().axes();

  std::vector<std::string> provenance;
  std::size_t dropped = 0;
  std::set<std::string> prompt_ids;
  for (const auto& ds : inputs) {
    if (ds.axes() != merged.axes) {
      throw Error(ErrorKind::kSchemaMismatch,
                  "dataset '" + ds.prompt_id() +
                      "' does not share the axis schema of '" +
                      inputs.front().prompt_id() + "'");
    }
    if (!prompt_ids.insert(ds.prompt_id()).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "prompt '" + ds.prompt_id() + "' aggregated twice");
    }
    provenance.push_back(ds.prompt_id());
    dropped += ds.dropped_no_person();
    for (const auto& variant : ds.variants()) {
      Variant* target = nullptr;
      for (auto& v : merged.variants) {
        if (v.key == variant.key) {
          target = &v;
          break;
        }
      }
      if (target == nullptr) {
        merged.variants.push_back(Variant{variant.key, {}});
        target = &merged.variants.back();
      }
      for (const auto& record : variant.records) {
        ImageRecord r = record;
        r.image_id = ds.prompt_id() + "/" + record.image_id;
        target->records.push_back(std::move(r));
      }
    }
  }
  return GlobalDataset{validate_dataset(std::move(merged)),
                       std::move(provenance), dropped};
}

inline PairwiseCausalGraph discover_global(const GlobalDataset& g,
                                           const AnalysisConfig& cfg) {
  return discover_graph(g.dataset, cfg);
}

}  // namespace isaudit

#endif  // ISAUDIT_AGGREGATE_HPP_
