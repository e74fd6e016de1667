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

#include "parse_util.h"

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "agda/errors.h"

namespace agda::internal {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void BadNumber(std::string_view text, std::string_view what) {
  throw Error(ErrorKind::kUsage, "cannot parse " + std::string(what) +
                                     " from '" + std::string(text) + "'");
}

}  // namespace

std::pair<std::string, KeyValues> SplitFamily(std::string_view text) {
  text = Trim(text);
  const size_t colon = text.find(':');
  std::string family(Trim(text.substr(0, colon)));
  if (family.empty()) {
    throw Error(ErrorKind::kUsage,
                "missing family name in '" + std::string(text) + "'");
  }
  KeyValues params;
  if (colon == std::string_view::npos) return {family, params};
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const size_t comma = rest.find(',');
    std::string_view item = Trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view()
                                           : rest.substr(comma + 1);
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorKind::kUsage,
                  "expected key=value, got '" + std::string(item) + "'");
    }
    std::string key(Trim(item.substr(0, eq)));
    std::string value(Trim(item.substr(eq + 1)));
    for (const auto& [k, v] : params) {
      if (k == key) {
        throw Error(ErrorKind::kUsage, "duplicate key '" + key + "'");
      }
    }
    params.emplace_back(std::move(key), std::move(value));
  }
  return {family, params};
}

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    BadNumber(text, what);
  }
  return value;
}

int64_t ParseInt(std::string_view text, std::string_view what) {
  text = Trim(text);
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) {
    return value;
  }
  // Accept integral values written in floating form, e.g. 1e5.
  const double as_double = ParseDouble(text, what);
  if (std::floor(as_double) != as_double || std::abs(as_double) > 9.0e15) {
    BadNumber(text, what);
  }
  return static_cast<int64_t>(as_double);
}

uint64_t ParseSeed(std::string_view text, std::string_view what) {
  text = Trim(text);
  uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    BadNumber(text, what);
  }
  return value;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string FormatDouble17(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                       std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace agda::internal
