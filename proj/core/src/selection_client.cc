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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>

#include <httplib.h>

#include "chartforge/som_pipeline.h"

namespace chartforge {

StubClient::StubClient(std::map<std::string, std::string> responses,
                       std::optional<std::string> fallback)
    : responses_(std::move(responses)), fallback_(std::move(fallback)) {}

std::string StubClient::select(const SelectionRequest& request) {
  auto it = responses_.find(request.sample_id);
  if (it != responses_.end()) return it->second;
  if (fallback_) return *fallback_;
  fail(ErrorCode::kClientFailure, "no scripted response for " + request.sample_id);
}

GoldSelectorClient::GoldSelectorClient(std::map<std::string, std::vector<std::string>> gold)
    : gold_(std::move(gold)) {}

std::string GoldSelectorClient::select(const SelectionRequest& request) {
  if (request.marked == nullptr) {
    fail(ErrorCode::kClientFailure, "gold selector needs the marked image");
  }
  auto it = gold_.find(request.sample_id);
  if (it == gold_.end()) {
    fail(ErrorCode::kClientFailure, "no gold targets for " + request.sample_id);
  }
  std::vector<int> marks;
  for (const auto& [mark, id] : request.marked->id_map) {
    if (std::find(it->second.begin(), it->second.end(), id) != it->second.end()) {
      marks.push_back(mark);
    }
  }
  return "Selected marks: " + render_selection(marks);
}

ReplayClient::ReplayClient(const std::filesystem::path& jsonl) {
  std::ifstream f(jsonl);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + jsonl.string());
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      responses_[j.at("sample_id").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kSchemaError, jsonl.string() + ": " + e.what());
    }
  }
}

std::string ReplayClient::select(const SelectionRequest& request) {
  auto it = responses_.find(request.sample_id);
  if (it == responses_.end()) {
    fail(ErrorCode::kClientFailure, "no cached response for " + request.sample_id);
  }
  return it->second;
}

HttpJsonClient::HttpJsonClient(std::string endpoint, std::string token_env, int timeout_s)
    : endpoint_(std::move(endpoint)), token_env_(std::move(token_env)), timeout_s_(timeout_s) {
  if (timeout_s_ <= 0) fail(ErrorCode::kInvalidArgument, "client timeout must be > 0");
}

std::string HttpJsonClient::select(const SelectionRequest& request) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint_, m, kUrl)) {
    fail(ErrorCode::kInvalidArgument, "endpoint must be an http(s) URL: " + endpoint_);
  }
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";

  nlohmann::json body{{"sample_id", request.sample_id},
                      {"expression", request.expression},
                      {"prompt", request.prompt},
                      {"candidate_count", request.candidate_count}};
  if (request.marked != nullptr) {
    const auto png = encode_png(request.marked->image);
    body["image_png_base64"] =
        httplib::detail::base64_encode(std::string(png.begin(), png.end()));
  }
  httplib::Headers headers;
  if (const char* token = std::getenv(token_env_.c_str()); token != nullptr && *token != 0) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  httplib::Client client(base);
  client.set_connection_timeout(timeout_s_);
  client.set_read_timeout(timeout_s_);
  client.set_write_timeout(timeout_s_);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    fail(ErrorCode::kClientFailure, "request to " + endpoint_ + " failed: " +
                                        httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    fail(ErrorCode::kClientFailure,
         "endpoint answered HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    if (reply.is_object() && reply.contains("response")) {
      return reply.at("response").get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return res->body;
}

}  // namespace chartforge
