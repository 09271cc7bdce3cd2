// Copyright 2026 The cmlearn Authors.
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

#include "cmlearn/error.hpp"

namespace cmlearn {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularConstraint: return "SingularConstraint";
    case ErrorCode::kNumericalDet: return "NumericalDet";
    case ErrorCode::kInfeasibleRegion: return "InfeasibleRegion";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

bool IsNumerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularConstraint:
    case ErrorCode::kNumericalDet:
    case ErrorCode::kInfeasibleRegion:
    case ErrorCode::kDegenerateData:
    case ErrorCode::kZeroVariance:
      return true;
    default:
      return false;
  }
}

}  // namespace cmlearn
