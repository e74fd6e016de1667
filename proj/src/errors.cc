// Copyright 2026 The Anchored GDA Authors
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

#include "agda/errors.h"

namespace agda {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage error";
    case ErrorKind::kDomain:
      return "domain error";
    case ErrorKind::kNumeric:
      return "numeric error";
    case ErrorKind::kDivergence:
      return "divergence";
    case ErrorKind::kData:
      return "data error";
    case ErrorKind::kInapplicable:
      return "inapplicable";
    case ErrorKind::kUnsupported:
      return "unsupported variant";
    case ErrorKind::kIo:
      return "I/O error";
  }
  return "error";
}

}  // namespace agda
