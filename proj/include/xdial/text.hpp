// Copyright 2026 the xdial authors
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xdial::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// ASCII case-folding plus whitespace collapsing.
std::string normalize(std::string_view s);

/// True for code points in the CJK ideograph, kana, hangul and CJK
/// punctuation blocks.
bool is_cjk(char32_t cp);

/// Word tokens: each CJK code point is its own token, everything else is
/// split on whitespace.
std::vector<std::string> tokenize(std::string_view s);

}  // namespace xdial::text
