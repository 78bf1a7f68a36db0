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

#ifndef ISAUDIT_ISAUDIT_HPP_
#define ISAUDIT_ISAUDIT_HPP_

#include "isaudit/aggregate.hpp"
#include "isaudit/contingency.hpp"
#include "isaudit/core_model.hpp"
#include "isaudit/discovery.hpp"
#include "isaudit/effects.hpp"
#include "isaudit/error.hpp"
#include "isaudit/io.hpp"
#include "isaudit/random.hpp"
#include "isaudit/report.hpp"
#include "isaudit/robustness.hpp"
#include "isaudit/simulator.hpp"
#include "isaudit/stats.hpp"
#include "isaudit/templates.hpp"

#endif  // ISAUDIT_ISAUDIT_HPP_
