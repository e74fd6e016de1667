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

#ifndef AGDA_POINT_H_
#define AGDA_POINT_H_

#include <cstdint>

#include "Eigen/Core"

namespace agda {

// A point z = (x, y) of R^n x R^m. The first n coordinates are the
// minimizing block, the remaining m the maximizing block.
class Point {
 public:
  // Throws Error(kUsage) on bad dimensions, Error(kDomain) on non-finite
  // entries.
  Point(Eigen::VectorXd coords, int64_t n);

  static Point Zeros(int64_t n, int64_t m);

  int64_t n() const { return n_; }
  int64_t m() const { return coords_.size() - n_; }
  int64_t dim() const { return coords_.size(); }

  const Eigen::VectorXd& coords() const { return coords_; }
  auto x() const { return coords_.head(n_); }
  auto y() const { return coords_.tail(m()); }

  double operator[](int64_t i) const { return coords_[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.n_ == b.n_ && a.coords_.size() == b.coords_.size() &&
           a.coords_ == b.coords_;
  }

 private:
  Eigen::VectorXd coords_;
  int64_t n_;
};

}  // namespace agda

#endif  // AGDA_POINT_H_
