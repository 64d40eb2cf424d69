// Copyright 2026 The Reflect Authors
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

#ifndef REFLECT_TEXT_H_
#define REFLECT_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 and string helpers shared by the tokenizers, the corpus
// reader and the masking code.
namespace reflect::text {

enum class CharClass {
  kWhitespace,
  kWord,        // letters and digits in any script
  kHyphen,
  kApostrophe,
  kPunctuation  // everything else
};

struct DecodedChar {
  char32_t code_point;
  std::size_t length;  // bytes consumed, >= 1
};

// Decodes one code point at `pos`. Malformed sequences decode as U+FFFD
// consuming a single byte.
DecodedChar DecodeUtf8(std::string_view s, std::size_t pos);

CharClass Classify(char32_t c);

// Lowercases ASCII letters only; other bytes are copied unchanged.
std::string AsciiLower(std::string_view s);

bool IsAsciiSpace(char c);
std::string_view Trim(std::string_view s);
std::vector<std::string_view> Split(std::string_view s, char delim);

bool StartsWith(std::string_view s, std::string_view prefix);

uint64_t Fnv1a64(std::string_view data);
std::string Hex64(uint64_t value);

// Reads a whole file; throws reflect::IoError on failure.
std::string ReadFile(const std::string& path);

}  // namespace reflect::text

#endif  // REFLECT_TEXT_H_
