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

#ifndef CHARTFORGE_ERROR_H_
#define CHARTFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace chartforge {

// Every failure the library reports carries one of these codes. The CLI maps
// execution failures to exit status 2 and everything else to 1.
enum class ErrorCode {
  kInvalidArgument,
  // scene_tracer
  kDuplicateMarker,
  kMalformedMarker,
  kExecTimeout,
  kScriptError,
  kNoMarkedCalls,
  kHarnessError,
  kUnknownMarker,
  kUnknownExecution,
  // mask_forge
  kEmptyMask,
  kRenderMismatch,
  kUnsupportedGranularity,
  kUnmappedCombination,
  // target_resolver
  kSchemaError,
  kAmbiguousNullInvocation,
  kIndexOutOfRange,
  kSingletonViolation,
  kCategoryMismatch,
  // dataset_io
  kLengthMismatch,
  kDanglingReference,
  kIOFailure,
  // eval_core
  kShapeMismatch,
  kDimensionMismatch,
  kEmptyInput,
  kUnknownCategory,
  // som_pipeline
  kEmptyCandidates,
  kNoSelectionFound,
  kUnknownMarkId,
  kClientFailure,
};

std::string_view error_code_name(ErrorCode code);

// True for failures of the environment or of executed code, as opposed to
// invalid input.
bool is_execution_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace chartforge

#endif  // CHARTFORGE_ERROR_H_
