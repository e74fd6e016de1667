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

#include "agda/point.h"

#include <cmath>
#include <string>
#include <utility>

#include "agda/errors.h"

namespace agda {

Point::Point(Eigen::VectorXd coords, int64_t n)
    : coords_(std::move(coords)), n_(n) {
  if (n_ < 1 || coords_.size() - n_ < 1) {
    throw Error(ErrorKind::kUsage,
                "point needs n >= 1 and m >= 1, got length " +
                    std::to_string(coords_.size()) + " with split " +
                    std::to_string(n_));
  }
  for (Eigen::Index i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw Error(ErrorKind::kDomain,
                  "non-finite coordinate at index " + std::to_string(i));
    }
  }
}

Point Point::Zeros(int64_t n, int64_t m) {
  if (n < 1 || m < 1) {
    throw Error(ErrorKind::kUsage, "point needs n >= 1 and m >= 1");
  }
  return Point(Eigen::VectorXd::Zero(n + m), n);
}

}  // namespace agda
