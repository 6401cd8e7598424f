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

#include "cli.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "chartforge/dataset_io.h"
#include "chartforge/error.h"
#include "chartforge/eval_core.h"
#include "chartforge/mask_forge.h"
#include "chartforge/predictions.h"
#include "chartforge/raster.h"
#include "chartforge/scene_tracer.h"
#include "chartforge/som_pipeline.h"
#include "chartforge/target_resolver.h"

namespace chartforge::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::optional<int64_t> seed;
  std::optional<double> timeout_s;
  std::optional<double> render_scale;
  std::optional<std::string> out_dir;
  std::optional<std::string> config_file;
};

struct Settings {
  RunConfig run;
  FilterConfig filter;
  bool out_given = false;
};

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kSchemaError, path.string() + ": " + e.what());
  }
}

Settings resolve_settings(const GlobalFlags& flags) {
  Settings s;
  if (flags.config_file) {
    const auto j = read_json_file(*flags.config_file);
    s.run = RunConfig::from_json(j);
    if (j.contains("filter")) s.filter = FilterConfig::from_json(j.at("filter"));
  }
  if (flags.seed) s.run.seed = *flags.seed;
  if (flags.timeout_s) s.run.timeout_s = *flags.timeout_s;
  if (flags.render_scale) s.run.render_scale = *flags.render_scale;
  if (flags.out_dir) {
    s.run.out_dir = *flags.out_dir;
    s.out_given = true;
  }
  s.run.validate();
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
  f << text;
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
}

// JSON reports go to <out>/<name> when --out is given, otherwise to stdout.
void emit_report(const Settings& s, const std::string& name, const nlohmann::json& j,
                 std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (s.out_given) {
    write_text(s.run.out_dir / name, text);
  } else {
    out << text;
  }
}

// Unique, filesystem-safe image ids derived from script stems.
std::vector<std::string> image_ids_for(const std::vector<std::string>& scripts) {
  std::vector<std::string> ids;
  std::set<std::string> used;
  for (const auto& s : scripts) {
    std::string stem = fs::path(s).stem().string();
    for (char& c : stem) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    }
    if (stem.empty()) stem = "image";
    std::string id = stem;
    for (int k = 2; used.count(id) != 0; ++k) id = stem + "_" + std::to_string(k);
    used.insert(id);
    ids.push_back(id);
  }
  return ids;
}

// Traces every script, `jobs` at a time; results keep input order.
std::vector<TracedScene> trace_all(const std::vector<std::string>& scripts,
                                   const RunConfig& config, int jobs) {
  std::vector<std::optional<TracedScene>> scenes(scripts.size());
  std::vector<std::exception_ptr> errors(scripts.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < scripts.size(); i = next++) {
      try {
        scenes[i] = execute_script_file(scripts[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scripts.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TracedScene> out;
  for (auto& s : scenes) out.push_back(std::move(*s));
  return out;
}

int cmd_trace(const Settings& s, const std::vector<std::string>& scripts, int jobs,
              std::ostream& out) {
  const auto ids = image_ids_for(scripts);
  const auto scenes = trace_all(scripts, s.run, jobs);
  for (size_t i = 0; i < scenes.size(); ++i) {
    save_scene(scenes[i], s.run.out_dir, ids[i]);
    out << ids[i] << ": " << scenes[i].calls.size() << " calls, "
        << scenes[i].primitives.size() << " primitives\n";
  }
  return kExitOk;
}

int cmd_synth(const Settings& s, const std::vector<std::string>& scripts, int jobs,
              std::ostream& out, std::ostream& err) {
  const auto ids = image_ids_for(scripts);
  const auto scenes = trace_all(scripts, s.run, jobs);
  std::vector<SceneEntry> entries;
  for (size_t i = 0; i < scenes.size(); ++i) {
    auto synth = synthesize_scene(scenes[i]);
    for (const auto& w : synth.warnings) err << "warning: " << ids[i] << ": " << w << "\n";
    entries.push_back({ids[i], &scenes[i], std::move(synth.instances)});
  }
  const auto bundle = emit_dataset(entries, {}, s.run.out_dir);
  out << "wrote " << bundle.images.size() << " images and " << bundle.annotations.size()
      << " annotations to " << s.run.out_dir.string() << "\n";
  return kExitOk;
}

int cmd_resolve(const Settings& s, const std::string& bundle_path,
                const std::string& request_path, std::ostream& out) {
  auto bundle = load_bundle(bundle_path);
  const auto request = read_json_file(request_path);
  if (!request.is_object() || !request.contains("samples") ||
      !request.at("samples").is_array()) {
    fail(ErrorCode::kSchemaError, request_path + " needs a \"samples\" list");
  }
  for (const auto& item : request.at("samples")) {
    GroundingSample sample;
    try {
      sample.id = item.at("id").get<std::string>();
      sample.image_id = item.at("image_id").get<std::string>();
      sample.expression = item.value("expression", "");
      const auto name = item.at("category").get<std::string>();
      const auto category = category_from_name(name);
      if (!category) fail(ErrorCode::kUnknownCategory, "unknown category '" + name + "'");
      sample.category = *category;
      if (item.contains("clue_labels")) {
        sample.clue_labels = clue_labels_from_json(item.at("clue_labels"));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kSchemaError, std::string("bad resolve request: ") + e.what());
    }
    if (!item.contains("target")) {
      fail(ErrorCode::kSchemaError, "sample " + sample.id + " has no target");
    }
    const auto ctx = bundle_context(bundle, sample.image_id);
    const auto spec = parse_target_json(item.at("target"), &ctx.marker_executions);
    sample.targets = resolve_targets(ctx, spec, sample.category);
    auto existing = std::find_if(bundle.samples.begin(), bundle.samples.end(),
                                 [&](const GroundingSample& g) { return g.id == sample.id; });
    if (existing != bundle.samples.end()) {
      *existing = std::move(sample);
    } else {
      bundle.samples.push_back(std::move(sample));
    }
  }
  const fs::path src_dir = bundle_json_path(bundle_path).parent_path();
  fs::path dst_dir = src_dir;
  if (s.out_given && fs::weakly_canonical(s.run.out_dir) != fs::weakly_canonical(src_dir)) {
    dst_dir = s.run.out_dir;
    fs::create_directories(dst_dir);
    fs::copy(src_dir / "images", dst_dir / "images",
             fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  }
  save_bundle(bundle, dst_dir);
  out << "resolved " << request.at("samples").size() << " samples; bundle has "
      << bundle.samples.size() << " samples\n";
  return kExitOk;
}

int cmd_eval(const Settings& s, const std::string& format_name_arg,
             const std::string& bundle_path, const std::string& preds_path,
             std::ostream& out) {
  const auto format = format_from_name(format_name_arg);
  if (!format) fail(ErrorCode::kInvalidArgument, "unknown format " + format_name_arg);
  const auto bundle = load_bundle(bundle_path);
  const auto preds = read_predictions(preds_path);
  auto report = report_to_json(evaluate_bundle(bundle, preds, *format));
  report["format"] = format_name(*format);
  emit_report(s, "report_" + std::string(format_name(*format)) + ".json", report, out);
  return kExitOk;
}

int cmd_map(const Settings& s, const std::string& bundle_path, const std::string& preds_path,
            std::ostream& out) {
  const auto bundle = load_bundle(bundle_path);
  const auto preds = read_instance_predictions(preds_path);
  emit_report(s, "map_report.json", map_report_to_json(evaluate_map(bundle, preds)), out);
  return kExitOk;
}

int cmd_stats(const Settings& s, const std::string& bundle_path, std::ostream& out) {
  emit_report(s, "stats.json", stats_to_json(dataset_stats(load_bundle(bundle_path))), out);
  return kExitOk;
}

int cmd_export_gold(const Settings& s, const std::string& what, const std::string& bundle_path,
                    std::ostream& out) {
  const auto bundle = load_bundle(bundle_path);
  const fs::path dir = s.run.out_dir;
  if (what == "instances") {
    write_instance_predictions(dir / "gold_instances.jsonl", gold_instances(bundle));
    out << (dir / "gold_instances.jsonl").string() << "\n";
    return kExitOk;
  }
  const auto format = format_from_name(what);
  if (!format) fail(ErrorCode::kInvalidArgument, "unknown export kind " + what);
  const auto path = dir / ("gold_" + std::string(format_name(*format)) + ".jsonl");
  write_predictions(path, gold_predictions(bundle, *format));
  out << path.string() << "\n";
  return kExitOk;
}

RgbImage bundle_image(const fs::path& bundle_path, const DatasetBundle& bundle,
                      const std::string& image_id) {
  const auto* im = bundle.find_image(image_id);
  if (im == nullptr) fail(ErrorCode::kDanglingReference, "unknown image " + image_id);
  return read_png(bundle_json_path(bundle_path).parent_path() / im->file);
}

std::string candidate_id(size_t line) { return "c" + std::to_string(line); }

int cmd_som_filter(const Settings& s, const std::string& bundle_path,
                   const std::string& candidates_path, std::ostream& out) {
  const auto bundle = load_bundle(bundle_path);
  const auto preds = read_instance_predictions(candidates_path);
  std::vector<std::string> images;
  for (const auto& p : preds) {
    if (std::find(images.begin(), images.end(), p.image_id) == images.end()) {
      images.push_back(p.image_id);
    }
  }
  std::vector<InstancePrediction> kept;
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& image_id : images) {
    const RgbImage image = bundle_image(bundle_path, bundle, image_id);
    std::vector<Candidate> cands;
    std::vector<size_t> lines;
    for (size_t i = 0; i < preds.size(); ++i) {
      if (preds[i].image_id != image_id) continue;
      cands.push_back({candidate_id(i), decode_rle(preds[i].segmentation)});
      lines.push_back(i);
    }
    const auto report = filter_candidates_detailed(cands, image, s.filter);
    for (const auto& c : report.kept) {
      const auto k = std::find_if(cands.begin(), cands.end(),
                                  [&](const Candidate& x) { return x.id == c.id; }) -
                     cands.begin();
      kept.push_back(preds[lines[static_cast<size_t>(k)]]);
    }
    for (const auto& [id, rule] : report.removed) {
      removed.push_back({{"image_id", image_id}, {"candidate", id}, {"rule", rule}});
    }
  }
  const fs::path dir = s.run.out_dir;
  write_instance_predictions(dir / "filtered.jsonl", kept);
  write_text(dir / "filter_log.json", removed.dump(2) + "\n");
  out << "kept " << kept.size() << " of " << preds.size() << " candidates\n";
  return kExitOk;
}

int cmd_som_overlay(const Settings& s, const std::string& image_path,
                    const std::string& candidates_path, std::ostream& out) {
  const RgbImage image = read_png(image_path);
  const auto preds = read_instance_predictions(candidates_path);
  std::vector<Candidate> cands;
  for (size_t i = 0; i < preds.size(); ++i) {
    cands.push_back({candidate_id(i), decode_rle(preds[i].segmentation)});
  }
  const auto marked = overlay_marks(image, cands);
  const fs::path dir = s.run.out_dir;
  fs::create_directories(dir);
  write_png(marked.image, dir / "marked.png");
  nlohmann::json id_map = nlohmann::json::object();
  for (const auto& [mark, id] : marked.id_map) id_map[std::to_string(mark)] = id;
  write_text(dir / "id_map.json", id_map.dump(2) + "\n");
  out << "marked " << cands.size() << " candidates\n";
  return kExitOk;
}

struct SomRunFlags {
  std::string candidates = "oracle";
  std::string client = "gold";
  std::string responses;
  std::string endpoint;
  std::string token_env = "CHARTFORGE_CLIENT_TOKEN";
  bool filter = false;
};

int cmd_som_run(const Settings& s, const std::string& bundle_path, const SomRunFlags& f,
                std::ostream& out, std::ostream& err) {
  const auto bundle = load_bundle(bundle_path);
  std::vector<InstancePrediction> pool;
  if (f.candidates != "oracle") pool = read_instance_predictions(f.candidates);

  std::map<std::string, std::vector<std::string>> gold;
  for (const auto& sample : bundle.samples) gold[sample.id] = sample.targets;
  std::unique_ptr<SelectionClient> client;
  if (f.client == "gold") {
    client = std::make_unique<GoldSelectorClient>(gold);
  } else if (f.client == "replay") {
    client = std::make_unique<ReplayClient>(f.responses);
  } else if (f.client == "http") {
    client = std::make_unique<HttpJsonClient>(f.endpoint, f.token_env);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown client " + f.client);
  }

  const fs::path dir = s.run.out_dir;
  GroundingOptions options;
  options.work_dir = dir / "marked";
  std::vector<PredictionSet> preds;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& sample : bundle.samples) {
    const RgbImage image = bundle_image(bundle_path, bundle, sample.image_id);
    std::vector<Candidate> cands;
    if (f.candidates == "oracle") {
      // Gold masks of the sample's category on its image.
      for (const auto& a : bundle.annotations) {
        if (a.image_id == sample.image_id && a.category == sample.category) {
          cands.push_back({a.id, annotation_mask(a)});
        }
      }
    } else {
      for (size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].image_id == sample.image_id) {
          cands.push_back({candidate_id(i), decode_rle(pool[i].segmentation)});
        }
      }
    }
    if (f.filter) cands = filter_candidates(cands, image, s.filter);
    const auto result = run_grounding(sample, image, cands, *client, options);
    nlohmann::json entry{{"sample_id", sample.id},
                         {"candidates", cands.size()},
                         {"selected", result.selected_ids},
                         {"response", result.response}};
    if (result.selection_error) {
      entry["selection_error"] = error_code_name(*result.selection_error);
      err << "warning: " << sample.id << ": " << error_code_name(*result.selection_error)
          << "; scored as an empty prediction\n";
    }
    log.push_back(std::move(entry));
    preds.push_back(result.prediction);
  }
  write_predictions(dir / "predictions.jsonl", preds);
  write_text(dir / "selections.json", log.dump(2) + "\n");
  const auto report = evaluate_bundle(bundle, preds, PredictionFormat::kMask);
  auto j = report_to_json(report);
  j["format"] = "mask";
  write_text(dir / "report.json", j.dump(2) + "\n");
  out << "macro_f1 " << report.macro_f1 << " over " << bundle.samples.size() << " samples\n";
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chart grounding data synthesis and evaluation", "chartforge"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Seed for randomized plotting data");
  app.add_option("--timeout", flags.timeout_s, "Per-script wall-clock limit in seconds");
  app.add_option("--render-scale", flags.render_scale, "Render scale in dots per inch");
  app.add_option("--out", flags.out_dir, "Output directory");
  app.add_option("--config", flags.config_file, "JSON run configuration")
      ->check(CLI::ExistingFile);

  int jobs = 1;
  std::vector<std::string> scripts;
  auto* trace = app.add_subcommand("trace", "Trace scripts into scene JSON and PNG");
  trace->add_option("scripts", scripts, "Plotting scripts")->required()->check(CLI::ExistingFile);
  trace->add_option("-j,--jobs", jobs, "Parallel scripts")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Synthesize a dataset bundle from scripts");
  synth->add_option("scripts", scripts, "Plotting scripts")->required()->check(CLI::ExistingFile);
  synth->add_option("-j,--jobs", jobs, "Parallel scripts")->check(CLI::PositiveNumber);

  std::string bundle_path, second_path, eval_format;
  auto* resolve = app.add_subcommand("resolve", "Attach grounding samples to a bundle");
  resolve->add_option("bundle", bundle_path)->required();
  resolve->add_option("targets", second_path, "Resolve request JSON")->required();

  auto* eval = app.add_subcommand("eval", "Grounding metrics for predictions");
  eval->add_option("format", eval_format)->required()->check(
      CLI::IsMember({"point", "bbox", "seg"}));
  eval->add_option("bundle", bundle_path)->required();
  eval->add_option("predictions", second_path)->required()->check(CLI::ExistingFile);

  auto* map = app.add_subcommand("map", "COCO-style mAP for instance predictions");
  map->add_option("bundle", bundle_path)->required();
  map->add_option("predictions", second_path)->required()->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("bundle", bundle_path)->required();

  std::string gold_kind;
  auto* gold = app.add_subcommand("export-gold", "Write ground truth as predictions");
  gold->add_option("kind", gold_kind)->required()->check(
      CLI::IsMember({"point", "bbox", "seg", "instances"}));
  gold->add_option("bundle", bundle_path)->required();

  auto* som = app.add_subcommand("som", "Set-of-Mark candidate pipeline");
  som->require_subcommand(1);
  auto* som_filter = som->add_subcommand("filter", "Filter candidate masks");
  som_filter->add_option("bundle", bundle_path)->required();
  som_filter->add_option("candidates", second_path)->required()->check(CLI::ExistingFile);
  std::string image_path;
  auto* som_overlay = som->add_subcommand("overlay", "Draw numbered marks on an image");
  som_overlay->add_option("image", image_path)->required()->check(CLI::ExistingFile);
  som_overlay->add_option("candidates", second_path)->required()->check(CLI::ExistingFile);
  SomRunFlags run_flags;
  auto* som_run = som->add_subcommand("run", "Mark, select and score every sample");
  som_run->add_option("bundle", bundle_path)->required();
  som_run->add_option("--candidates", run_flags.candidates,
                      "\"oracle\" or an instance-prediction JSONL file");
  som_run->add_option("--client", run_flags.client)
      ->check(CLI::IsMember({"gold", "replay", "http"}));
  som_run->add_option("--responses", run_flags.responses, "Replay JSONL");
  som_run->add_option("--endpoint", run_flags.endpoint, "HTTP endpoint URL");
  som_run->add_option("--token-env", run_flags.token_env);
  som_run->add_flag("--filter", run_flags.filter, "Filter candidates before marking");

  for (auto* sub : {trace, synth, resolve, eval, map, stats, gold, som, som_filter,
                    som_overlay, som_run}) {
    sub->fallthrough();
  }

  std::vector<std::string> argv_storage{"chartforge"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "chartforge: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const Settings settings = resolve_settings(flags);
    if (*trace) return cmd_trace(settings, scripts, jobs, out);
    if (*synth) return cmd_synth(settings, scripts, jobs, out, err);
    if (*resolve) return cmd_resolve(settings, bundle_path, second_path, out);
    if (*eval) return cmd_eval(settings, eval_format, bundle_path, second_path, out);
    if (*map) return cmd_map(settings, bundle_path, second_path, out);
    if (*stats) return cmd_stats(settings, bundle_path, out);
    if (*gold) return cmd_export_gold(settings, gold_kind, bundle_path, out);
    if (*som_filter) return cmd_som_filter(settings, bundle_path, second_path, out);
    if (*som_overlay) return cmd_som_overlay(settings, image_path, second_path, out);
    if (*som_run) return cmd_som_run(settings, bundle_path, run_flags, out, err);
  } catch (const Error& e) {
    err << "chartforge: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return is_execution_error(e.code()) ? kExitExecution : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "chartforge: IOFailure: " << e.what() << "\n";
    return kExitExecution;
  } catch (const std::exception& e) {
    err << "chartforge: " << e.what() << "\n";
    return kExitExecution;
  }
  err << "chartforge: no command\n";
  return kExitValidation;
}

}  // namespace chartforge::cli
