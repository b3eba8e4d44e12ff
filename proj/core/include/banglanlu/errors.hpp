// Copyright 2026 The banglanlu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bnlu {

enum class ErrorCode {
  // corpus
  UnbalancedMarkup,
  EmptyEntityName,
  EmptyEntitySurface,
  SyntaxError,
  DuplicateIntentBlock,
  IntentWithNoExamples,
  UnknownIntentInStory,
  UnknownActionInStory,
  UnknownEntityInStory,
  DuplicateStoryName,
  InvalidResponseName,
  IntentTooSmall,
  InvalidArgument,
  // text
  InvalidUtf8,
  // featurize
  HeaderMismatch,
  NonFiniteValue,
  TokenCountMismatch,
  InvalidPattern,
  // models
  DimensionMismatch,
  EmptyTrainingSet,
  NonFiniteLoss,
  EmptyStorySet,
  ArchiveFormat,
  // dialogue
  NonMonotonicTimestamp,
  ActionLoopLimit,
  // evaluation
  UnknownLabel,
  EmptyMatrix,
  // gateway
  TransliterationFailure,
  // configuration and io
  ConfigError,
  IoError,
};

/// Stable snake_case name of an error code, e.g. "unbalanced_markup".
std::string_view error_name(ErrorCode code);

/// Coarse category used by the CLI's `error:<category>:` prefix: one of
/// "data", "config", "model", "dialogue", "io".
std::string_view error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bnlu
