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

#ifndef RETRO_CALENDAR_H_
#define RETRO_CALENDAR_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace retro {

// A UTC calendar day, stored as days since 1970-01-01.
class Day {
 public:
  constexpr Day() = default;
  constexpr explicit Day(int32_t serial) : serial_(serial) {}

  static Day FromCivil(int year, unsigned month, unsigned day);
  // Accepts YYYY-MM-DD, optionally followed by a 'T' time suffix which is
  // ignored. Throws kParse on malformed input.
  static Day FromIso(std::string_view text);

  constexpr int32_t serial() const { return serial_; }
  int Year() const;
  std::string ToIso() const;

  constexpr Day operator+(int32_t days) const { return Day(serial_ + days); }
  constexpr Day operator-(int32_t days) const { return Day(serial_ - days); }
  // Half-open difference in calendar days.
  constexpr int32_t operator-(Day other) const {
    return serial_ - other.serial_;
  }
  constexpr auto operator<=>(const Day &) const = default;

 private:
  int32_t serial_ = 0;
};

// First day the continuous fuzzer is known to have run.
inline Day SyzbotStart() { return Day::FromCivil(2017, 7, 22); }

}  // namespace retro

#endif  // RETRO_CALENDAR_H_
