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

#ifndef RETRO_STRINGS_H_
#define RETRO_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace retro {

// Splits on `sep`; an empty input yields an empty vector.
std::vector<std::string> Split(std::string_view text, char sep);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);
std::string_view Trim(std::string_view text);
bool StartsWith(std::string_view text, std::string_view prefix);
std::string ToLower(std::string_view text);
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace retro

#endif  // RETRO_STRINGS_H_
