// Copyright 2026 The Retro Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "retro/calendar.h"

#include <chrono>
#include <cstdio>

#include "retro/error.h"

namespace retro {

Day Day::FromCivil(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    Fail(ErrorCode::kParse, "invalid calendar date " + std::to_string(year) +
                                "-" + std::to_string(month) + "-" +
                                std::to_string(day));
  }
  return Day(static_cast<int32_t>(
      std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Day Day::FromIso(std::string_view text) {
  auto digits = [&](size_t from, size_t count) -> int {
    int value = 0;
    for (size_t i = from; i < from + count; ++i) {
      if (i >= text.size() || text[i] < '0' || text[i] > '9') {
        Fail(ErrorCode::kParse, "malformed ISO-8601 date '" +
                                    std::string(text) + "'");
      }
      value = value * 10 + (text[i] - '0');
    }
    return value;
  };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-' ||
      (text.size() > 10 && text[10] != 'T')) {
    Fail(ErrorCode::kParse,
         "malformed ISO-8601 date '" + std::string(text) + "'");
  }
  return FromCivil(digits(0, 4), static_cast<unsigned>(digits(5, 2)),
                   static_cast<unsigned>(digits(8, 2)));
}

int Day::Year() const {
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{serial_}}};
  return static_cast<int>(ymd.year());
}

std::string Day::ToIso() const {
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{serial_}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace retro
