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

#ifndef AGDA_SRC_PARSE_UTIL_H_
#define AGDA_SRC_PARSE_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace agda::internal {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Splits `family:key=v,key=v` into the family name and its parameters.
// Throws Error(kUsage) on malformed input or duplicate keys.
std::pair<std::string, KeyValues> SplitFamily(std::string_view text);

double ParseDouble(std::string_view text, std::string_view what);
int64_t ParseInt(std::string_view text, std::string_view what);
uint64_t ParseSeed(std::string_view text, std::string_view what);

// Shortest text that round-trips a double (17 significant digits at most).
std::string FormatDouble(double value);
// Fixed 17 significant digits, the trace CSV number format.
std::string FormatDouble17(double value);

}  // namespace agda::internal

#endif  // AGDA_SRC_PARSE_UTIL_H_
