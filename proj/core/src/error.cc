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

#include "chartforge/error.h"

namespace chartforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateMarker: return "DuplicateMarker";
    case ErrorCode::kMalformedMarker: return "MalformedMarker";
    case ErrorCode::kExecTimeout: return "ExecTimeout";
    case ErrorCode::kScriptError: return "ScriptError";
    case ErrorCode::kNoMarkedCalls: return "NoMarkedCalls";
    case ErrorCode::kHarnessError: return "HarnessError";
    case ErrorCode::kUnknownMarker: return "UnknownMarker";
    case ErrorCode::kUnknownExecution: return "UnknownExecution";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kRenderMismatch: return "RenderMismatch";
    case ErrorCode::kUnsupportedGranularity: return "UnsupportedGranularity";
    case ErrorCode::kUnmappedCombination: return "UnmappedCombination";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kAmbiguousNullInvocation: return "AmbiguousNullInvocation";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kSingletonViolation: return "SingletonViolation";
    case ErrorCode::kCategoryMismatch: return "CategoryMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kIOFailure: return "IOFailure";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kNoSelectionFound: return "NoSelectionFound";
    case ErrorCode::kUnknownMarkId: return "UnknownMarkId";
    case ErrorCode::kClientFailure: return "ClientFailure";
  }
  return "Unknown";
}

bool is_execution_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kExecTimeout:
    case ErrorCode::kScriptError:
    case ErrorCode::kNoMarkedCalls:
    case ErrorCode::kHarnessError:
    case ErrorCode::kRenderMismatch:
    case ErrorCode::kIOFailure:
    case ErrorCode::kClientFailure:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chartforge
