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

#ifndef ISAUDIT_CONTINGENCY_HPP_
#define ISAUDIT_CONTINGENCY_HPP_

#include <string>
#include <string_view>

#include "isaudit/core_model.hpp"
#include "isaudit/error.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

inline void CheckInterventionPair(const ValidatedDataset& ds,
                                  std::string_view bx, std::string_view by) {
  ds.axis(bx);
  ds.axis(by);
  if (bx == by) {
    throw Error(ErrorKind::kSameAxis,
                "axis '" + std::string(bx) + "' cannot target itself");
  }
  if (!ds.is_intervenable(bx)) {
    throw Error(ErrorKind::kNonIntervenableAxis,
                "axis '" + std::string(bx) +
                    "' lacks a counterfactual variant for some attribute");
  }
}

// One row per counterfactual attribute of `bx` (schema order); row j holds the
// counts of `by` attributes in the images generated for that counterfactual.
// The initial-prompt images never enter the table.
inline ContingencyTable build_contingency(const ValidatedDataset& ds,
                                          std::string_view bx,
                                          std::string_view by) {
  CheckInterventionPair(ds, bx, by);
  const AxisSchema& source = ds.axis(bx);
  const AxisSchema& target = ds.axis(by);
  ContingencyTable table;
  table.row_labels = source.attributes;
  table.col_labels = target.attributes;
  table.cells.reserve(source.size());
  for (const auto& label : source.attributes) {
    table.cells.push_back(
        variant_counts(ds, VariantKey::Counterfactual(source.name, label), by)
            .counts);
  }
  return table;
}

}  // namespace isaudit

#endif  // ISAUDIT_CONTINGENCY_HPP_
