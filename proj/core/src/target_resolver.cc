// Copyright 2026 The Chartforge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chartforge/target_resolver.h"

#include <algorithm>
#include <set>

#include "chartforge/error.h"

namespace chartforge {
namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::kSchemaError, msg); }

template <size_t N>
bool in_vocabulary(const std::array<std::string_view, N>& vocab, const std::string& s) {
  return std::find(vocab.begin(), vocab.end(), s) != vocab.end();
}

TargetEntry parse_entry(const nlohmann::json& e, size_t pos) {
  const std::string where = "results[" + std::to_string(pos) + "]";
  if (!e.is_object()) schema(where + " is not an object");
  TargetEntry entry;
  if (!e.contains("line") || !e.at("line").is_string()) schema(where + ".line missing");
  entry.line = e.at("line").get<std::string>();
  if (!is_valid_marker_id(entry.line)) schema(where + ".line '" + entry.line + "' is not #k");
  if (e.contains("invocation_count") && !e.at("invocation_count").is_null()) {
    const auto& ic = e.at("invocation_count");
    if (!ic.is_number_integer() || ic.get<int64_t>() < 0) {
      schema(where + ".invocation_count must be a non-negative integer or null");
    }
    entry.invocation_count = ic.get<int>();
  }
  if (e.contains("element_indices") && !e.at("element_indices").is_null()) {
    const auto& ei = e.at("element_indices");
    if (!ei.is_array() || ei.empty()) {
      schema(where + ".element_indices must be a non-empty list or null");
    }
    std::vector<int> indices;
    for (const auto& v : ei) {
      if (!v.is_number_integer() || v.get<int64_t>() < 0) {
        schema(where + ".element_indices entries must be non-negative integers");
      }
      const int idx = v.get<int>();
      if (std::find(indices.begin(), indices.end(), idx) != indices.end()) {
        schema(where + ".element_indices repeats " + std::to_string(idx));
      }
      indices.push_back(idx);
    }
    entry.element_indices = std::move(indices);
  }
  return entry;
}

}  // namespace

TargetSpec parse_target_json(const nlohmann::json& j,
                             const std::map<std::string, int>* marker_executions) {
  if (!j.is_object() || !j.contains("results") || !j.at("results").is_array()) {
    schema("target JSON needs a \"results\" list");
  }
  const auto& results = j.at("results");
  if (results.empty()) schema("target JSON must refer to at least one element");
  TargetSpec spec;
  for (size_t i = 0; i < results.size(); ++i) {
    spec.results.push_back(parse_entry(results[i], i));
  }
  if (marker_executions != nullptr) return canonicalize_spec(std::move(spec), *marker_executions);
  return spec;
}

TargetSpec parse_target_json(std::string_view text,
                             const std::map<std::string, int>* marker_executions) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    schema(std::string("target JSON does not parse: ") + e.what());
  }
  return parse_target_json(j, marker_executions);
}

nlohmann::json target_spec_to_json(const TargetSpec& spec) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& e : spec.results) {
    results.push_back(
        {{"line", e.line},
         {"invocation_count", e.invocation_count ? nlohmann::json(*e.invocation_count)
                                                 : nlohmann::json(nullptr)},
         {"element_indices", e.element_indices ? nlohmann::json(*e.element_indices)
                                               : nlohmann::json(nullptr)}});
  }
  return {{"results", results}};
}

TargetSpec canonicalize_spec(TargetSpec spec,
                             const std::map<std::string, int>& marker_executions) {
  for (auto& e : spec.results) {
    if (e.invocation_count) continue;
    auto it = marker_executions.find(e.line);
    const int runs = it == marker_executions.end() ? 0 : it->second;
    if (runs == 0) fail(ErrorCode::kUnknownExecution, e.line + " never executed");
    if (runs > 1) {
      fail(ErrorCode::kAmbiguousNullInvocation,
           e.line + " ran " + std::to_string(runs) + " times; invocation_count is required");
    }
    e.invocation_count = 0;
  }
  return spec;
}

ClueLabels clue_labels_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema("clue_labels must be an object");
  ClueLabels c;
  try {
    c.primary = j.value("primary", std::vector<std::string>{});
    c.subtypes = j.value("subtypes", std::vector<std::string>{});
    c.hybrid = j.value("hybrid", false);
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("bad clue_labels: ") + e.what());
  }
  for (const auto& p : c.primary) {
    if (!in_vocabulary(kPrimaryClues, p)) schema("unknown primary clue '" + p + "'");
  }
  for (const auto& s : c.subtypes) {
    if (!in_vocabulary(kClueSubtypes, s)) schema("unknown clue subtype '" + s + "'");
  }
  return c;
}

nlohmann::json clue_labels_to_json(const ClueLabels& c) {
  return {{"primary", c.primary}, {"subtypes", c.subtypes}, {"hybrid", c.hybrid}};
}

ResolveContext make_context(const TracedScene& scene,
                            const std::vector<InstanceMask>& instances) {
  ResolveContext ctx;
  ctx.marker_executions = scene.marker_executions();
  for (const auto& m : instances) {
    ctx.instances.push_back({m.instance_id, m.category, m.provenance.marker,
                             m.provenance.invocation_count,
                             m.provenance.element_index.value_or(0)});
  }
  return ctx;
}

std::vector<std::string> resolve_targets(const ResolveContext& context,
                                         const TargetSpec& raw_spec,
                                         ElementCategory category) {
  if (raw_spec.results.empty()) schema("target spec selects nothing");
  const TargetSpec spec = canonicalize_spec(raw_spec, context.marker_executions);
  std::vector<std::string> out;
  auto add = [&out](const std::string& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  for (const auto& e : spec.results) {
    const int inv = *e.invocation_count;
    auto it = context.marker_executions.find(e.line);
    const int runs = it == context.marker_executions.end() ? 0 : it->second;
    if (inv >= runs) {
      fail(ErrorCode::kUnknownExecution, e.line + " invocation " + std::to_string(inv) +
                                             " does not exist (" + std::to_string(runs) +
                                             " executions)");
    }
    std::vector<const InstanceRef*> candidates;
    for (const auto& ref : context.instances) {
      if (ref.marker == e.line && ref.invocation_count == inv && ref.category == category) {
        candidates.push_back(&ref);
      }
    }
    if (candidates.empty()) {
      fail(ErrorCode::kCategoryMismatch, e.line + " invocation " + std::to_string(inv) +
                                             " has no " +
                                             std::string(category_name(category)) +
                                             " instances");
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto* a, const auto* b) { return a->element_index < b->element_index; });
    if (!e.element_indices) {
      if (candidates.size() != 1) {
        fail(ErrorCode::kSingletonViolation,
             e.line + " invocation " + std::to_string(inv) + " created " +
                 std::to_string(candidates.size()) + " elements; element_indices required");
      }
      add(candidates.front()->id);
      continue;
    }
    for (int idx : *e.element_indices) {
      auto found = std::find_if(candidates.begin(), candidates.end(),
                                [idx](const auto* r) { return r->element_index == idx; });
      if (found == candidates.end()) {
        fail(ErrorCode::kIndexOutOfRange,
             e.line + " invocation " + std::to_string(inv) + " has no element " +
                 std::to_string(idx) + " (" + std::to_string(candidates.size()) +
                 " elements)");
      }
      add((*found)->id);
    }
  }
  return out;
}

std::vector<std::string> resolve_targets(const TracedScene& scene, const TargetSpec& spec,
                                         ElementCategory category) {
  const auto synth = synthesize_scene(scene);
  return resolve_targets(make_context(scene, synth.instances), spec, category);
}

TargetFormats materialize_formats(const std::vector<InstanceMask>& instances,
                                  const std::vector<std::string>& targets) {
  if (targets.empty()) fail(ErrorCode::kEmptyInput, "no targets to materialize");
  TargetFormats out;
  std::optional<ElementCategory> category;
  for (const auto& id : targets) {
    auto it = std::find_if(instances.begin(), instances.end(),
                           [&id](const InstanceMask& m) { return m.instance_id == id; });
    if (it == instances.end()) fail(ErrorCode::kDanglingReference, "unknown instance " + id);
    if (category && *category != it->category) {
      fail(ErrorCode::kCategoryMismatch, "targets mix " +
                                             std::string(category_name(*category)) + " and " +
                                             std::string(category_name(it->category)));
    }
    category = it->category;
    out.points.push_back(representative_point(it->bitmap));
    out.bboxes.push_back(tight_bbox(it->bitmap));
    out.masks.push_back(it->bitmap);
  }
  return out;
}

}  // namespace chartforge
