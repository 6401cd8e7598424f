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

#ifndef CHARTFORGE_SRC_SUBPROCESS_H_
#define CHARTFORGE_SRC_SUBPROCESS_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chartforge::internal {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout and stderr, interleaved
};

// Runs argv[0] (looked up on PATH) in its own process group with extra
// environment variables, stdout/stderr redirected to `log_file`. The whole
// group is killed when `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env,
                          const std::filesystem::path& working_dir,
                          const std::filesystem::path& log_file,
                          std::chrono::milliseconds timeout);

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace chartforge::internal

#endif  // CHARTFORGE_SRC_SUBPROCESS_H_
