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

#include "banglanlu/errors.hpp"

namespace bnlu {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedMarkup: return "unbalanced_markup";
    case ErrorCode::EmptyEntityName: return "empty_entity_name";
    case ErrorCode::EmptyEntitySurface: return "empty_entity_surface";
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::DuplicateIntentBlock: return "duplicate_intent_block";
    case ErrorCode::IntentWithNoExamples: return "intent_with_no_examples";
    case ErrorCode::UnknownIntentInStory: return "unknown_intent_in_story";
    case ErrorCode::UnknownActionInStory: return "unknown_action_in_story";
    case ErrorCode::UnknownEntityInStory: return "unknown_entity_in_story";
    case ErrorCode::DuplicateStoryName: return "duplicate_story_name";
    case ErrorCode::InvalidResponseName: return "invalid_response_name";
    case ErrorCode::IntentTooSmall: return "intent_too_small";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidUtf8: return "invalid_utf8";
    case ErrorCode::HeaderMismatch: return "header_mismatch";
    case ErrorCode::NonFiniteValue: return "non_finite_value";
    case ErrorCode::TokenCountMismatch: return "token_count_mismatch";
    case ErrorCode::InvalidPattern: return "invalid_pattern";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::EmptyTrainingSet: return "empty_training_set";
    case ErrorCode::NonFiniteLoss: return "non_finite_loss";
    case ErrorCode::EmptyStorySet: return "empty_story_set";
    case ErrorCode::ArchiveFormat: return "archive_format";
    case ErrorCode::NonMonotonicTimestamp: return "non_monotonic_timestamp";
    case ErrorCode::ActionLoopLimit: return "action_loop_limit";
    case ErrorCode::UnknownLabel: return "unknown_label";
    case ErrorCode::EmptyMatrix: return "empty_matrix";
    case ErrorCode::TransliterationFailure: return "transliteration_failure";
    case ErrorCode::ConfigError: return "config_error";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

std::string_view error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidPattern:
      return "config";
    case ErrorCode::IoError:
      return "io";
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyTrainingSet:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::EmptyStorySet:
    case ErrorCode::ArchiveFormat:
      return "model";
    case ErrorCode::NonMonotonicTimestamp:
    case ErrorCode::ActionLoopLimit:
      return "dialogue";
    default:
      return "data";
  }
}

}  // namespace bnlu
