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

#ifndef CHARTFORGE_TESTS_TEST_SUPPORT_H_
#define CHARTFORGE_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "chartforge/bitmap.h"
#include "chartforge/scene_tracer.h"

namespace chartforge::testing {

inline std::filesystem::path fixture_dir() { return CHARTFORGE_FIXTURE_DIR; }

inline std::filesystem::path script_path(const std::string& stem) {
  return fixture_dir() / "scripts" / (stem + ".py");
}

// One script per category, sorted by file name.
inline std::vector<std::filesystem::path> corpus_scripts() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir() / "scripts")) {
    if (e.path().extension() == ".py") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Traces each fixture at most once per process.
inline const TracedScene& traced_fixture(const std::filesystem::path& script) {
  static std::mutex mu;
  static std::map<std::string, TracedScene> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(script.string());
  if (it == cache.end()) {
    RunConfig cfg;
    cfg.timeout_s = 120;
    it = cache.emplace(script.string(), execute_script_file(script, cfg)).first;
  }
  return it->second;
}

inline const TracedScene& traced_fixture(const char* stem) {
  return traced_fixture(script_path(stem));
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("chartforge-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Bitmap random_bitmap(std::mt19937& rng, int h, int w, double density) {
  std::bernoulli_distribution coin(density);
  Bitmap b(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) b.set(x, y, coin(rng));
  }
  return b;
}

inline Bitmap rect_mask(int h, int w, int x0, int y0, int x1, int y1) {
  Bitmap b(h, w);
  b.fill_rect(x0, y0, x1, y1);
  return b;
}

}  // namespace chartforge::testing

#endif  // CHARTFORGE_TESTS_TEST_SUPPORT_H_
