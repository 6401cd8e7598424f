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

#include "chartforge/dataset_io.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "chartforge/error.h"
#include "chartforge/raster.h"

namespace chartforge {
namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::kSchemaError, msg); }

template <typename T>
nlohmann::json nullable(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

ElementCategory parse_category(const nlohmann::json& j) {
  auto c = category_from_name(j.get<std::string>());
  if (!c) schema("unknown category '" + j.get<std::string>() + "'");
  return *c;
}

nlohmann::json annotation_to_json(const Annotation& a) {
  return {{"id", a.id},
          {"image_id", a.image_id},
          {"instance_id", a.instance_id},
          {"category", category_name(a.category)},
          {"category_id", category_id(a.category)},
          {"granularity", granularity_name(a.granularity)},
          {"segmentation", rle_to_json(a.rle)},
          {"bbox", {a.bbox.x_min, a.bbox.y_min, a.bbox.x_max, a.bbox.y_max}},
          {"point", {a.point.x, a.point.y}},
          {"area", a.area},
          {"provenance",
           {{"marker", nullable(a.provenance.marker)},
            {"invocation_count", a.provenance.invocation_count},
            {"element_index", nullable(a.provenance.element_index)},
            {"call_index", a.provenance.call_index}}}};
}

Annotation annotation_from_json(const nlohmann::json& j) {
  Annotation a;
  a.id = j.at("id").get<std::string>();
  a.image_id = j.at("image_id").get<std::string>();
  a.instance_id = j.at("instance_id").get<std::string>();
  a.category = parse_category(j.at("category"));
  if (j.contains("category_id") && j.at("category_id").get<int>() != category_id(a.category)) {
    schema("annotation " + a.id + " has inconsistent category_id");
  }
  auto g = granularity_from_name(j.at("granularity").get<std::string>());
  if (!g) schema("annotation " + a.id + " has unknown granularity");
  a.granularity = *g;
  a.rle = rle_from_json(j.at("segmentation"));
  const auto box = j.at("bbox").get<std::array<double, 4>>();
  a.bbox = {box[0], box[1], box[2], box[3]};
  const auto pt = j.at("point").get<std::array<double, 2>>();
  a.point = {pt[0], pt[1]};
  a.area = j.at("area").get<int64_t>();
  const auto& p = j.at("provenance");
  if (!p.at("marker").is_null()) a.provenance.marker = p.at("marker").get<std::string>();
  a.provenance.invocation_count = p.at("invocation_count").get<int>();
  if (!p.at("element_index").is_null()) {
    a.provenance.element_index = p.at("element_index").get<int>();
  }
  a.provenance.call_index = p.at("call_index").get<int>();
  return a;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int64_t word_count(const std::string& s) {
  std::istringstream in(s);
  int64_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

}  // namespace

const ImageRecord* DatasetBundle::find_image(std::string_view id) const {
  for (const auto& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

const Annotation* DatasetBundle::find_annotation(std::string_view id) const {
  for (const auto& a : annotations) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

std::string annotation_id(std::string_view image_id, std::string_view instance_id) {
  return std::string(image_id) + "/" + std::string(instance_id);
}

Annotation make_annotation(std::string_view image_id, const InstanceMask& mask) {
  Annotation a;
  a.id = annotation_id(image_id, mask.instance_id);
  a.image_id = std::string(image_id);
  a.instance_id = mask.instance_id;
  a.category = mask.category;
  a.granularity = mask.granularity;
  a.rle = encode_rle(mask.bitmap);
  a.bbox = tight_bbox(mask.bitmap);
  a.point = representative_point(mask.bitmap);
  a.area = mask.bitmap.count();
  a.provenance = mask.provenance;
  return a;
}

Bitmap annotation_mask(const Annotation& a) { return decode_rle(a.rle); }

void validate_bundle(const DatasetBundle& bundle) {
  std::set<std::string> image_ids;
  for (const auto& im : bundle.images) {
    if (!image_ids.insert(im.id).second) schema("duplicate image id " + im.id);
  }
  std::set<std::string> ann_ids;
  for (const auto& a : bundle.annotations) {
    if (!ann_ids.insert(a.id).second) schema("duplicate annotation id " + a.id);
    const auto* im = bundle.find_image(a.image_id);
    if (im == nullptr) {
      fail(ErrorCode::kDanglingReference, "annotation " + a.id + " references missing image " +
                                              a.image_id);
    }
    if (a.rle.height != im->height || a.rle.width != im->width) {
      fail(ErrorCode::kDimensionMismatch, "annotation " + a.id + " size differs from image");
    }
  }
  std::set<std::string> sample_ids;
  for (const auto& s : bundle.samples) {
    if (!sample_ids.insert(s.id).second) schema("duplicate sample id " + s.id);
    if (bundle.find_image(s.image_id) == nullptr) {
      fail(ErrorCode::kDanglingReference, "sample " + s.id + " references missing image " +
                                              s.image_id);
    }
    if (s.targets.empty()) schema("sample " + s.id + " has no targets");
    if (s.clue_labels.empty()) schema("sample " + s.id + " has no clue labels");
    std::set<std::string> seen;
    for (const auto& t : s.targets) {
      if (!seen.insert(t).second) schema("sample " + s.id + " repeats target " + t);
      const auto* a = bundle.find_annotation(t);
      if (a == nullptr || a->image_id != s.image_id) {
        fail(ErrorCode::kDanglingReference, "sample " + s.id + " references missing annotation " + t);
      }
      if (a->category != s.category) {
        fail(ErrorCode::kCategoryMismatch,
             "sample " + s.id + " is " + std::string(category_name(s.category)) +
                 " but target " + t + " is " + std::string(category_name(a->category)));
      }
    }
  }
}

nlohmann::json sample_to_json(const GroundingSample& s) {
  return {{"id", s.id},
          {"image_id", s.image_id},
          {"expression", s.expression},
          {"category", category_name(s.category)},
          {"clue_labels", clue_labels_to_json(s.clue_labels)},
          {"targets", s.targets}};
}

GroundingSample sample_from_json(const nlohmann::json& j) {
  try {
    GroundingSample s;
    s.id = j.at("id").get<std::string>();
    s.image_id = j.at("image_id").get<std::string>();
    s.expression = j.value("expression", "");
    s.category = parse_category(j.at("category"));
    if (j.contains("clue_labels")) s.clue_labels = clue_labels_from_json(j.at("clue_labels"));
    s.targets = j.value("targets", std::vector<std::string>{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("bad sample: ") + e.what());
  }
}

nlohmann::json bundle_to_json(const DatasetBundle& bundle) {
  nlohmann::json j;
  j["schema_version"] = kBundleSchemaVersion;
  j["categories"] = nlohmann::json::array();
  for (auto c : all_categories()) {
    j["categories"].push_back({{"id", category_id(c)},
                               {"name", category_name(c)},
                               {"granularity", granularity_name(category_granularity(c))},
                               {"thin_line", is_thin_line(c)}});
  }
  j["images"] = nlohmann::json::array();
  for (const auto& im : bundle.images) {
    j["images"].push_back({{"id", im.id},
                           {"file", im.file},
                           {"height", im.height},
                           {"width", im.width},
                           {"source_tag", im.source_tag},
                           {"marker_executions", im.marker_executions}});
  }
  j["annotations"] = nlohmann::json::array();
  for (const auto& a : bundle.annotations) j["annotations"].push_back(annotation_to_json(a));
  j["samples"] = nlohmann::json::array();
  for (const auto& s : bundle.samples) j["samples"].push_back(sample_to_json(s));
  return j;
}

DatasetBundle bundle_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema_version", 0) != kBundleSchemaVersion) {
      schema("unsupported dataset schema_version");
    }
    DatasetBundle b;
    for (const auto& im : j.at("images")) {
      ImageRecord r;
      r.id = im.at("id").get<std::string>();
      r.file = im.at("file").get<std::string>();
      r.height = im.at("height").get<int>();
      r.width = im.at("width").get<int>();
      r.source_tag = im.value("source_tag", "");
      r.marker_executions =
          im.value("marker_executions", std::map<std::string, int>{});
      b.images.push_back(std::move(r));
    }
    for (const auto& a : j.at("annotations")) b.annotations.push_back(annotation_from_json(a));
    for (const auto& s : j.at("samples")) b.samples.push_back(sample_from_json(s));
    validate_bundle(b);
    return b;
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("bad dataset JSON: ") + e.what());
  }
}

std::filesystem::path bundle_json_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "dataset.json";
  return path;
}

void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& out_dir) {
  validate_bundle(bundle);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "dataset.json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
  f << bundle_to_json(bundle).dump() << "\n";
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
}

DatasetBundle load_bundle(const std::filesystem::path& path) {
  const auto json_path = bundle_json_path(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(json_path));
  } catch (const nlohmann::json::parse_error& e) {
    schema(json_path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

DatasetBundle emit_dataset(const std::vector<SceneEntry>& scenes,
                           const std::vector<GroundingSample>& samples,
                           const std::filesystem::path& out_dir) {
  DatasetBundle bundle;
  for (const auto& entry : scenes) {
    if (entry.scene == nullptr) fail(ErrorCode::kInvalidArgument, "null scene " + entry.image_id);
    ImageRecord r;
    r.id = entry.image_id;
    r.file = "images/" + entry.image_id + ".png";
    r.height = entry.scene->height();
    r.width = entry.scene->width();
    r.source_tag = entry.scene->source_name;
    r.marker_executions = entry.scene->marker_executions();
    bundle.images.push_back(std::move(r));
    for (const auto& m : entry.instances) {
      bundle.annotations.push_back(make_annotation(entry.image_id, m));
    }
  }
  bundle.samples = samples;
  validate_bundle(bundle);

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) fail(ErrorCode::kIOFailure, "cannot create " + (out_dir / "images").string());
  for (const auto& entry : scenes) {
    write_png(entry.scene->image, out_dir / "images" / (entry.image_id + ".png"));
  }
  save_bundle(bundle, out_dir);
  return load_bundle(out_dir);
}

ResolveContext bundle_context(const DatasetBundle& bundle, std::string_view image_id) {
  const auto* im = bundle.find_image(image_id);
  if (im == nullptr) {
    fail(ErrorCode::kDanglingReference, "unknown image " + std::string(image_id));
  }
  ResolveContext ctx;
  ctx.marker_executions = im->marker_executions;
  for (const auto& a : bundle.annotations) {
    if (a.image_id != image_id) continue;
    ctx.instances.push_back({a.id, a.category, a.provenance.marker,
                             a.provenance.invocation_count,
                             a.provenance.element_index.value_or(0)});
  }
  return ctx;
}

StatsReport dataset_stats(const DatasetBundle& bundle) {
  StatsReport r;
  r.images = static_cast<int64_t>(bundle.images.size());
  r.annotations = static_cast<int64_t>(bundle.annotations.size());
  r.samples = static_cast<int64_t>(bundle.samples.size());
  for (const auto& a : bundle.annotations) {
    ++r.annotations_per_category[std::string(category_name(a.category))];
  }
  int64_t total_targets = 0;
  for (const auto& s : bundle.samples) {
    const auto k = static_cast<int64_t>(s.targets.size());
    total_targets += k;
    ++r.targets_per_sample[k];
    ++r.expression_words[word_count(s.expression)];
    ++r.samples_per_category[std::string(category_name(s.category))];
    for (const auto& p : s.clue_labels.primary) ++r.clue_counts[p];
    for (const auto& t : s.clue_labels.subtypes) ++r.clue_counts[t];
    if (s.clue_labels.hybrid) ++r.clue_counts["hybrid"];
  }
  if (r.samples > 0) {
    r.mean_targets = static_cast<double>(total_targets) / static_cast<double>(r.samples);
  }
  return r;
}

nlohmann::json stats_to_json(const StatsReport& s) {
  auto hist = [](const std::map<int64_t, int64_t>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  return {{"images", s.images},
          {"annotations", s.annotations},
          {"samples", s.samples},
          {"mean_targets", s.mean_targets},
          {"targets_per_sample", hist(s.targets_per_sample)},
          {"expression_words", hist(s.expression_words)},
          {"samples_per_category", s.samples_per_category},
          {"annotations_per_category", s.annotations_per_category},
          {"clue_counts", s.clue_counts}};
}

}  // namespace chartforge
