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

#ifndef CHARTFORGE_TOOLS_CLI_H_
#define CHARTFORGE_TOOLS_CLI_H_

#include <iostream>
#include <string>
#include <vector>

namespace chartforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitExecution = 2;

// Runs one command line (without the program name). Reports go to `out`,
// diagnostics to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);

}  // namespace chartforge::cli

#endif  // CHARTFORGE_TOOLS_CLI_H_
