// Copyright 2026 The gaussgeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaussgeo/errors.hpp"

namespace gaussgeo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNotSymmetric:
      return "NotSymmetric";
    case ErrorCode::kNotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::kNotFaithful:
      return "NotFaithful";
    case ErrorCode::kNotSymplectic:
      return "NotSymplectic";
    case ErrorCode::kIllConditioned:
      return "IllConditioned";
    case ErrorCode::kSingularPoint:
      return "SingularPoint";
    case ErrorCode::kSingularMatrix:
      return "SingularMatrix";
    case ErrorCode::kCutoffTooSmall:
      return "CutoffTooSmall";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace gaussgeo
