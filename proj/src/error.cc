// Copyright 2026 The physderiv Authors
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

#include "physderiv/error.h"

namespace physderiv {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidState:
      return "invalid-state";
    case ErrorKind::kPolicyEval:
      return "policy-eval";
    case ErrorKind::kInvalidShift:
      return "invalid-shift";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kDegenerateSignal:
      return "degenerate-signal";
    case ErrorKind::kLandmarkMissing:
      return "landmark-missing";
    case ErrorKind::kDataset:
      return "dataset";
    case ErrorKind::kInvalidSample:
      return "invalid-sample";
    case ErrorKind::kFit:
      return "fit";
    case ErrorKind::kInsufficientData:
      return "insufficient-data";
    case ErrorKind::kIndex:
      return "index";
    case ErrorKind::kDegenerateScore:
      return "degenerate-score";
    case ErrorKind::kUndefinedAlignment:
      return "undefined-alignment";
    case ErrorKind::kTargetUnreachable:
      return "target-unreachable";
    case ErrorKind::kDependency:
      return "dependency";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace physderiv
