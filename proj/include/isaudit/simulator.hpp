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

// Synthetic biased generator with exact ground truth.
//
// A BiasNetwork is a small Bayesian network over bias axes. Sampling it stands
// in for generating images and extracting their attributes: the initial
// variant is drawn from the network as is, and the counterfactual variant for
// axis X = a is drawn from the mutilated network in which X is clamped to a
// and its incoming edges are cut (the do-operator). Because the network is
// known, every distribution the pipeline estimates can also be computed
// exactly by enumerating the joint state space.

#ifndef ISAUDIT_SIMULATOR_HPP_
#define ISAUDIT_SIMULATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isaudit/core_model.hpp"
#include "isaudit/effects.hpp"
#include "isaudit/error.hpp"
#include "isaudit/random.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

struct CptRow {
  std::vector<std::string> given;  // one label per parent, in parents order
  std::vector<double> probs;

  bool operator==(const CptRow&) const = default;
};

struct BiasNetwork {
  std::vector<AxisSchema> axes;
  std::map<std::string, std::vector<std::string>> parents;  // absent = root
  std::map<std::string, std::vector<CptRow>> cpts;

  const std::vector<std::string>& parents_of(const std::string& axis) const {
    static const std::vector<std::string> kNone;
    auto it = parents.find(axis);
    return it == parents.end() ? kNone : it->second;
  }

  bool operator==(const BiasNetwork&) const = default;
};

struct SimConfig {
  BiasNetwork network;
  std::size_t n_per_variant = 48;
  std::uint64_t seed = 0;
  std::string prompt_id = "simulated";
};

// Index-based form of a validated network.
class CompiledNetwork {
 public:
  explicit CompiledNetwork(const BiasNetwork& net) : net_(net) { Compile(); }

  const BiasNetwork& network() const { return net_; }
  std::size_t num_axes() const { return net_.axes.size(); }
  const std::vector<std::size_t>& topological_order() const { return order_; }
  const std::vector<std::size_t>& parents(std::size_t axis) const {
    return parent_idx_[axis];
  }

  std::size_t axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < net_.axes.size(); ++i)
      if (net_.axes[i].name == name) return i;
    throw Error(ErrorKind::kUnknownAxis,
                "network has no axis '" + std::string(name) + "'");
  }

  // Conditional distribution of `axis` given the current joint assignment.
  const std::vector<double>& row(std::size_t axis,
                                 const std::vector<std::size_t>& state) const {
    std::size_t code = 0;
    for (std::size_t p : parent_idx_[axis]) {
      code = code * net_.axes[p].size() + state[p];
    }
    return tables_[axis][code];
  }

 private:
  [[noreturn]] static void Fail(const std::string& msg) {
    throw Error(ErrorKind::kInvalidNetwork, msg);
  }

  void Compile() {
    const std::size_t n = net_.axes.size();
    if (n == 0) Fail("network has no axes");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        CheckAxisSchema(net_.axes[i]);
      } catch (const Error& e) {
        Fail(e.what());
      }
      if (!index.emplace(net_.axes[i].name, i).second) {
        Fail("axis '" + net_.axes[i].name + "' declared twice");
      }
    }
    for (const auto& [child, _] : net_.parents) {
      if (!index.count(child)) Fail("parents given for unknown axis '" + child + "'");
    }
    for (const auto& [axis, _] : net_.cpts) {
      if (!index.count(axis)) Fail("CPT given for unknown axis '" + axis + "'");
    }

    parent_idx_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::size_t> seen;
      for (const auto& p : net_.parents_of(net_.axes[i].name)) {
        auto it = index.find(p);
        if (it == index.end()) Fail("unknown parent '" + p + "'");
        if (it->second == i) Fail("axis '" + p + "' is its own parent");
        if (!seen.insert(it->second).second) Fail("parent '" + p + "' repeated");
        parent_idx_[i].push_back(it->second);
      }
    }

    // Kahn's algorithm; ties broken by schema order.
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) indegree[i] = parent_idx_[i].size();
    std::vector<bool> done(n, false);
    while (order_.size() < n) {
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && indegree[i] == 0) {
          pick = i;
          break;
        }
      }
      if (pick == n) Fail("parent graph has a cycle");
      done[pick] = true;
      order_.push_back(pick);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p : parent_idx_[i])
          if (p == pick) --indegree[i];
      }
    }

    tables_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      const AxisSchema& axis = net_.axes[i];
      std::size_t rows = 1;
      for (std::size_t p : parent_idx_[i]) rows *= net_.axes[p].size();
      tables_[i].assign(rows, {});
      auto it = net_.cpts.find(axis.name);
      if (it == net_.cpts.end()) Fail("axis '" + axis.name + "' has no CPT");
      for (const auto& cpt_row : it->second) {
        if (cpt_row.given.size() != parent_idx_[i].size()) {
          Fail("CPT row of '" + axis.name + "' has wrong number of parent labels");
        }
        std::size_t code = 0;
        for (std::size_t k = 0; k < cpt_row.given.size(); ++k) {
          const AxisSchema& parent = net_.axes[parent_idx_[i][k]];
          auto label = parent.index_of(cpt_row.given[k]);
          if (!label) {
            Fail("CPT row of '" + axis.name + "' uses unknown label '" +
                 cpt_row.given[k] + "' of '" + parent.name + "'");
          }
          code = code * parent.size() + *label;
        }
        if (!tables_[i][code].empty()) {
          Fail("CPT of '" + axis.name + "' repeats a parent assignment");
        }
        if (cpt_row.probs.size() != axis.size()) {
          Fail("CPT row of '" + axis.name + "' has wrong length");
        }
        try {
          CheckDistribution(CategoricalDist{axis.name, cpt_row.probs});
        } catch (const Error& e) {
          Fail(std::string("CPT row invalid: ") + e.what());
        }
        tables_[i][code] = cpt_row.probs;
      }
      for (const auto& r : tables_[i]) {
        if (r.empty()) Fail("CPT of '" + axis.name + "' misses a parent assignment");
      }
    }
  }

  BiasNetwork net_;
  std::vector<std::vector<std::size_t>> parent_idx_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::vector<double>>> tables_;
};

inline void CheckNetwork(const BiasNetwork& net) { CompiledNetwork{net}; }

namespace detail {

inline std::string ImageId(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img-%04zu", i);
  return buf;
}

struct Clamp {
  std::size_t axis;
  std::size_t value;
};

inline Variant SampleVariant(const CompiledNetwork& net, VariantKey key,
                             std::optional<Clamp> clamp, std::size_t n,
                             Rng& rng) {
  const auto& axes = net.network().axes;
  Variant variant{std::move(key), {}};
  variant.records.reserve(n);
  std::vector<std::size_t> state(axes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a : net.topological_order()) {
      if (clamp && clamp->axis == a) {
        state[a] = clamp->value;
      } else {
        state[a] = rng.categorical(net.row(a, state));
      }
    }
    ImageRecord record;
    record.image_id = ImageId(i);
    record.has_person = true;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      record.attributes.emplace(axes[a].name, axes[a].attributes[state[a]]);
    }
    variant.records.push_back(std::move(record));
  }
  return variant;
}

}  // namespace detail

// Draws the initial variant and one counterfactual variant per (axis,
// attribute), in schema order, from a single seeded stream. The output is a
// deterministic function of the configuration.
inline AttributeDataset sample_dataset(const SimConfig& cfg) {
  if (cfg.n_per_variant < 1) {
    throw Error(ErrorKind::kInvalidArgument, "n_per_variant must be >= 1");
  }
  const CompiledNetwork net(cfg.network);
  const auto& axes = cfg.network.axes;
  Rng rng(cfg.seed);

  AttributeDataset ds;
  ds.prompt_id = cfg.prompt_id;
  ds.axes = axes;
  ds.variants.push_back(detail::SampleVariant(net, VariantKey::Init(),
                                              std::nullopt, cfg.n_per_variant,
                                              rng));
  for (std::size_t a = 0; a < axes.size(); ++a) {
    for (std::size_t v = 0; v < axes[a].size(); ++v) {
      ds.variants.push_back(detail::SampleVariant(
          net, VariantKey::Counterfactual(axes[a].name, axes[a].attributes[v]),
          detail::Clamp{a, v}, cfg.n_per_variant, rng));
    }
  }
  return ds;
}

struct ExactDistributions {
  std::map<std::string, CategoricalDist> init;
  // (intervened axis, clamped attribute) -> marginal of every axis
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, CategoricalDist>>
      do_marginals;
};

inline constexpr std::size_t kMaxExactStates = 10'000'000;

namespace detail {

// Marginals of every axis under an optional clamp, by summing the joint over
// all states.
inline std::map<std::string, CategoricalDist> EnumerateMarginals(
    const CompiledNetwork& net, std::optional<Clamp> clamp) {
  const auto& axes = net.network().axes;
  const std::size_t n = axes.size();
  std::vector<std::vector<double>> marg(n);
  for (std::size_t a = 0; a < n; ++a) marg[a].assign(axes[a].size(), 0.0);

  std::vector<std::size_t> state(n, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t a = 0; a < n && p > 0.0; ++a) {
      if (clamp && clamp->axis == a) {
        if (state[a] != clamp->value) p = 0.0;
      } else {
        p *= net.row(a, state)[state[a]];
      }
    }
    if (p > 0.0) {
      for (std::size_t a = 0; a < n; ++a) marg[a][state[a]] += p;
    }
    std::size_t a = 0;
    for (; a < n; ++a) {
      if (++state[a] < axes[a].size()) break;
      state[a] = 0;
    }
    if (a == n) break;
  }

  std::map<std::string, CategoricalDist> out;
  for (std::size_t a = 0; a < n; ++a) {
    out.emplace(axes[a].name, CategoricalDist{axes[a].name, std::move(marg[a])});
  }
  return out;
}

}  // namespace detail

inline ExactDistributions exact_distributions(const BiasNetwork& network) {
  const CompiledNetwork net(network);
  double states = 1.0;
  for (const auto& axis : network.axes) states *= static_cast<double>(axis.size());
  if (states > static_cast<double>(kMaxExactStates)) {
    throw Error(ErrorKind::kStateSpaceTooLarge,
                "joint state space has " + std::to_string(states) + " states");
  }
  ExactDistributions out;
  out.init = detail::EnumerateMarginals(net, std::nullopt);
  for (std::size_t a = 0; a < network.axes.size(); ++a) {
    const auto& axis = network.axes[a];
    for (std::size_t v = 0; v < axis.size(); ++v) {
      out.do_marginals.emplace(
          std::make_pair(axis.name, axis.attributes[v]),
          detail::EnumerateMarginals(net, detail::Clamp{a, v}));
    }
  }
  return out;
}

// Equal-weight mixture of the do(bx = a) marginals of `by` over all a.
inline CategoricalDist exact_intervened_distribution(
    const BiasNetwork& network, const ExactDistributions& exact,
    std::string_view bx, std::string_view by) {
  const AxisSchema* source = nullptr;
  const AxisSchema* target = nullptr;
  for (const auto& a : network.axes) {
    if (a.name == bx) source = &a;
    if (a.name == by) target = &a;
  }
  if (source == nullptr || target == nullptr) {
    throw Error(ErrorKind::kUnknownAxis, "axis not in network");
  }
  CategoricalDist out{target->name, std::vector<double>(target->size(), 0.0)};
  for (const auto& label : source->attributes) {
    const auto& d =
        exact.do_marginals.at({source->name, label}).at(target->name);
    for (std::size_t i = 0; i < d.size(); ++i) out.probs[i] += d.probs[i];
  }
  for (auto& p : out.probs) p /= static_cast<double>(source->size());
  return out;
}

inline SensitivityEntry exact_sensitivity(const BiasNetwork& network,
                                          std::string_view bx,
                                          std::string_view by,
                                          const IdealSpec& spec,
                                          const AnalysisConfig& cfg) {
  if (bx == by) {
    throw Error(ErrorKind::kSameAxis,
                "axis '" + std::string(bx) + "' cannot target itself");
  }
  const auto exact = exact_distributions(network);
  const AxisSchema* target = nullptr;
  for (const auto& a : network.axes)
    if (a.name == by) target = &a;
  if (target == nullptr) {
    throw Error(ErrorKind::kUnknownAxis,
                "network has no axis '" + std::string(by) + "'");
  }
  const auto ideal = ideal_distribution(spec, *target);
  const double w_init = deviation(exact.init.at(target->name), ideal, *target, cfg);
  const double w_post = deviation(
      exact_intervened_distribution(network, exact, bx, by), ideal, *target, cfg);
  return MakeSensitivity(w_init, w_post);
}

// Largest total-variation distance between the do-marginals of `by` for any
// two clamp values of `bx`. Zero means `bx` has no causal effect on `by`.
inline double causal_effect_gap(const BiasNetwork& network,
                                const ExactDistributions& exact,
                                std::string_view bx, std::string_view by) {
  const AxisSchema* source = nullptr;
  for (const auto& a : network.axes)
    if (a.name == bx) source = &a;
  if (source == nullptr) {
    throw Error(ErrorKind::kUnknownAxis,
                "network has no axis '" + std::string(bx) + "'");
  }
  double gap = 0.0;
  for (const auto& l1 : source->attributes) {
    for (const auto& l2 : source->attributes) {
      const auto& d1 = exact.do_marginals.at({source->name, l1}).at(std::string(by));
      const auto& d2 = exact.do_marginals.at({source->name, l2}).at(std::string(by));
      gap = std::max(gap, wasserstein1(d1, d2, MetricKind::kNominal));
    }
  }
  return gap;
}

}  // namespace isaudit

#endif  // ISAUDIT_SIMULATOR_HPP_
