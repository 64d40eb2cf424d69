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

#include "reflect/reflection.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "reflect/text.h"

namespace reflect {
namespace {

bool IsWordish(text::CharClass c) {
  return c == text::CharClass::kWord || c == text::CharClass::kHyphen ||
         c == text::CharClass::kApostrophe;
}

// A word token, or a phrase boundary when `boundary` is set.
struct Item {
  bool boundary = false;
  std::size_t begin = 0;  // byte span of the word in the input
  std::size_t end = 0;
  std::string lower;
};

// Splits `s` into word tokens and boundaries. Words are runs of letters,
// digits, hyphens and apostrophes with hyphens and apostrophes stripped
// from both ends; stripped marks and all other punctuation act as
// boundaries. Whitespace only separates.
std::vector<Item> Tokenize(std::string_view s) {
  struct Unit {
    std::size_t begin;
    std::size_t length;
    text::CharClass cls;
  };
  std::vector<Unit> units;
  for (std::size_t pos = 0; pos < s.size();) {
    const auto d = text::DecodeUtf8(s, pos);
    units.push_back({pos, d.length, text::Classify(d.code_point)});
    pos += d.length;
  }

  std::vector<Item> items;
  auto push_boundary = [&] {
    if (!items.empty() && items.back().boundary) return;
    items.push_back({true, 0, 0, {}});
  };
  for (std::size_t i = 0; i < units.size();) {
    if (units[i].cls == text::CharClass::kWhitespace) {
      ++i;
      continue;
    }
    if (!IsWordish(units[i].cls)) {
      push_boundary();
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < units.size() && IsWordish(units[j].cls)) ++j;
    std::size_t first = i;
    std::size_t last = j;  // exclusive
    while (first < last && units[first].cls != text::CharClass::kWord) ++first;
    while (last > first && units[last - 1].cls != text::CharClass::kWord) {
      --last;
    }
    if (first == last) {
      push_boundary();
    } else {
      if (first > i) push_boundary();
      const std::size_t begin = units[first].begin;
      const std::size_t end = units[last - 1].begin + units[last - 1].length;
      items.push_back(
          {false, begin, end, text::AsciiLower(s.substr(begin, end - begin))});
      if (last < j) push_boundary();
    }
    i = j;
  }
  return items;
}

struct Candidate {
  std::vector<std::string> words;
  std::string joined;
};

std::vector<Candidate> Candidates(std::string_view s,
                                  const RakeConfig& config) {
  std::vector<Candidate> out;
  Candidate current;
  auto flush = [&] {
    if (!current.words.empty() &&
        current.joined.size() >= config.min_phrase_chars) {
      out.push_back(std::move(current));
    }
    current = {};
  };
  for (const Item& item : Tokenize(s)) {
    if (item.boundary || config.stopwords.count(item.lower) > 0) {
      flush();
      continue;
    }
    if (!current.words.empty()) current.joined += ' ';
    current.joined += item.lower;
    current.words.push_back(item.lower);
  }
  flush();
  return out;
}

std::string CollapseHeader(std::string_view line) {
  // Drops leading markup such as "1.", "-", "*", "#" and returns the
  // lowercased remainder.
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (text::IsAsciiSpace(c) || c == '#' || c == '*' || c == '-' ||
        c == '_' || c == '>') {
      ++i;
    } else if (c >= '0' && c <= '9') {
      std::size_t j = i;
      while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
      if (j < line.size() && (line[j] == '.' || line[j] == ')')) {
        i = j + 1;
      } else {
        break;
      }
    } else {
      break;
    }
  }
  return text::AsciiLower(line.substr(i));
}

constexpr std::array<const char*, 3> kSectionNames = {"ERRORS", "FIXES",
                                                      "CRITICAL"};

// If `line` opens a section, returns its index and the byte offset where
// the section body starts within the line.
std::optional<std::pair<int, std::size_t>> MatchHeader(std::string_view line) {
  const std::string collapsed = CollapseHeader(line);
  const std::size_t skipped = line.size() - collapsed.size();
  for (int s = 0; s < 3; ++s) {
    const std::string name = text::AsciiLower(kSectionNames[s]);
    if (!text::StartsWith(collapsed, name)) continue;
    std::size_t k = name.size();
    while (k < collapsed.size() && collapsed[k] == '*') ++k;
    if (k >= collapsed.size() || collapsed[k] != ':') continue;
    ++k;
    while (k < collapsed.size() && collapsed[k] == '*') ++k;
    return std::make_pair(s, skipped + k);
  }
  return std::nullopt;
}

std::string LowerForScan(std::string_view s) { return text::AsciiLower(s); }

struct Segment {
  std::string text;
  bool mask = false;
};

// Replaces residual case-insensitive occurrences of `phrase` inside
// non-mask segments, widening each hit to the enclosing word run.
bool MaskResidual(std::vector<Segment>& segments, const std::string& phrase) {
  bool changed = false;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].mask) continue;
    const std::string& s = segments[i].text;
    const std::size_t hit = LowerForScan(s).find(phrase);
    if (hit == std::string::npos) continue;

    // Code point starts and classes, to widen without splitting UTF-8.
    std::vector<std::size_t> starts;
    std::vector<bool> wordish;
    for (std::size_t pos = 0; pos < s.size();) {
      const auto d = text::DecodeUtf8(s, pos);
      starts.push_back(pos);
      wordish.push_back(IsWordish(text::Classify(d.code_point)));
      pos += d.length;
    }
    starts.push_back(s.size());
    auto unit_of = [&](std::size_t byte) {
      return static_cast<std::size_t>(
          std::upper_bound(starts.begin(), starts.end(), byte) -
          starts.begin() - 1);
    };
    std::size_t first = unit_of(hit);
    std::size_t last = unit_of(hit + phrase.size() - 1) + 1;
    if (wordish[first]) {
      while (first > 0 && wordish[first - 1]) --first;
    }
    if (wordish[last - 1]) {
      while (last < wordish.size() && wordish[last]) ++last;
    }
    std::vector<Segment> replacement;
    if (starts[first] > 0) replacement.push_back({s.substr(0, starts[first])});
    replacement.push_back({std::string(kMaskToken), true});
    if (starts[last] < s.size()) replacement.push_back({s.substr(starts[last])});
    segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i));
    segments.insert(segments.begin() + static_cast<std::ptrdiff_t>(i),
                    replacement.begin(), replacement.end());
    changed = true;
  }
  return changed;
}

}  // namespace

void RakeConfig::Validate() const {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw ConfigError("rake_top_fraction", "must be within (0, 1]");
  }
  if (max_phrases < 1) {
    throw ConfigError("rake_max_phrases", "must be at least 1");
  }
}

RakeConfig RakeConfig::Default() {
  RakeConfig config;
  config.stopwords = LoadStopwords(DefaultDataDir() / "stopwords" / "smart.txt");
  return config;
}

std::unordered_set<std::string> LoadStopwords(
    const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  std::ifstream in(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view word = text::Trim(line);
    if (!word.empty()) words.insert(text::AsciiLower(word));
  }
  return words;
}

std::vector<RakePhrase> RakeExtract(std::string_view text,
                                    const RakeConfig& config) {
  config.Validate();
  const std::vector<Candidate> candidates = Candidates(text, config);

  std::map<std::string, double> frequency;
  std::map<std::string, double> degree;
  for (const Candidate& c : candidates) {
    for (const std::string& w : c.words) {
      frequency[w] += 1.0;
      degree[w] += static_cast<double>(c.words.size());
    }
  }

  std::vector<RakePhrase> ranked;
  std::unordered_set<std::string> seen;
  for (const Candidate& c : candidates) {
    if (!seen.insert(c.joined).second) continue;
    double score = 0.0;
    for (const std::string& w : c.words) score += degree[w] / frequency[w];
    ranked.push_back({c.joined, score});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RakePhrase& a, const RakePhrase& b) {
                     return a.score > b.score;
                   });

  const double wanted =
      std::ceil(config.top_fraction * static_cast<double>(ranked.size()) - 1e-9);
  const std::size_t keep =
      std::min(config.max_phrases, static_cast<std::size_t>(wanted));
  if (ranked.size() > keep) ranked.resize(keep);
  return ranked;
}

Reflection ParseReflection(std::string_view raw_text) {
  std::array<std::optional<std::string>, 3> sections;
  int open = -1;
  std::size_t line_start = 0;
  while (line_start <= raw_text.size()) {
    std::size_t line_end = raw_text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = raw_text.size();
    const std::string_view line =
        raw_text.substr(line_start, line_end - line_start);
    const auto header = MatchHeader(line);
    if (header && !sections[header->first]) {
      open = header->first;
      sections[open] = std::string(line.substr(header->second));
    } else if (open >= 0) {
      *sections[open] += '\n';
      *sections[open] += line;
    }
    line_start = line_end + 1;
  }
  for (int s = 0; s < 3; ++s) {
    if (!sections[s]) throw SectionMissing(kSectionNames[s]);
  }
  Reflection r;
  r.error_identification = std::string(text::Trim(*sections[0]));
  r.high_level_fixes = std::string(text::Trim(*sections[1]));
  r.critical_content = std::string(text::Trim(*sections[2]));
  r.raw_text = std::string(raw_text);
  return r;
}

Reflection GenerateReflection(LlmClient& client, const ModelSpec& spec,
                              const PromptTemplates& templates,
                              const SentencePair& pair, Strategy strategy,
                              std::string_view draft) {
  if (text::Trim(draft).empty()) {
    throw ConfigError("draft", "cannot reflect on an empty draft");
  }
  const ChatRequest request{"", templates.RenderReflectionRequest(pair, draft),
                            {StrategyName(strategy), "reflection", pair.id}};
  for (int attempt = 0;; ++attempt) {
    const CompletionResult result = client.Complete(spec, request);
    try {
      return ParseReflection(result.text);
    } catch (const SectionMissing&) {
      if (attempt >= 1) throw;
    }
  }
}

Reflection MaskReflection(Reflection reflection, const RakeConfig& config) {
  std::vector<RakePhrase> phrases;
  if (!text::Trim(reflection.critical_content).empty()) {
    phrases = RakeExtract(reflection.critical_content, config);
  }
  reflection.masked_phrases.clear();
  for (const auto& p : phrases) reflection.masked_phrases.push_back(p.phrase);
  if (phrases.empty()) {
    reflection.masked_text = reflection.raw_text;
    return reflection;
  }

  // Longest first: more words, then more bytes, then rank order.
  std::vector<std::vector<std::string>> ordered;
  for (const auto& p : phrases) {
    std::vector<std::string> words;
    for (auto w : text::Split(p.phrase, ' ')) words.emplace_back(w);
    ordered.push_back(std::move(words));
  }
  std::vector<std::size_t> order(phrases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ordered[a].size() != ordered[b].size()) {
      return ordered[a].size() > ordered[b].size();
    }
    return phrases[a].phrase.size() > phrases[b].phrase.size();
  });

  const std::string& raw = reflection.raw_text;
  std::vector<Item> words;
  for (Item& item : Tokenize(raw)) {
    if (!item.boundary) words.push_back(std::move(item));
  }
  auto whitespace_gap = [&](std::size_t from, std::size_t to) {
    if (from >= to) return false;
    for (std::size_t pos = from; pos < to;) {
      const auto d = text::DecodeUtf8(raw, pos);
      if (text::Classify(d.code_point) != text::CharClass::kWhitespace) {
        return false;
      }
      pos += d.length;
    }
    return true;
  };

  std::vector<bool> consumed(words.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t idx : order) {
    const auto& target = ordered[idx];
    const std::size_t k = target.size();
    for (std::size_t i = 0; i + k <= words.size(); ++i) {
      bool match = true;
      for (std::size_t t = 0; t < k && match; ++t) {
        match = !consumed[i + t] && words[i + t].lower == target[t] &&
                (t == 0 || whitespace_gap(words[i + t - 1].end,
                                          words[i + t].begin));
      }
      if (!match) continue;
      for (std::size_t t = 0; t < k; ++t) consumed[i + t] = true;
      spans.emplace_back(words[i].begin, words[i + k - 1].end);
      i += k - 1;
    }
  }
  std::sort(spans.begin(), spans.end());

  std::vector<Segment> segments;
  std::size_t cursor = 0;
  for (const auto& [begin, end] : spans) {
    if (begin > cursor) segments.push_back({raw.substr(cursor, begin - cursor)});
    segments.push_back({std::string(kMaskToken), true});
    cursor = end;
  }
  if (cursor < raw.size()) segments.push_back({raw.substr(cursor)});

  for (std::size_t idx : order) {
    while (MaskResidual(segments, phrases[idx].phrase)) {
    }
  }

  reflection.masked_text.clear();
  for (const Segment& s : segments) reflection.masked_text += s.text;
  return reflection;
}

bool LeaksPhrase(std::string_view masked_text, std::string_view phrase) {
  if (phrase.empty()) return false;
  const std::string needle = text::AsciiLower(phrase);
  std::size_t start = 0;
  while (start <= masked_text.size()) {
    std::size_t next = masked_text.find(kMaskToken, start);
    if (next == std::string_view::npos) next = masked_text.size();
    if (text::AsciiLower(masked_text.substr(start, next - start)).find(needle) !=
        std::string::npos) {
      return true;
    }
    start = next + kMaskToken.size();
  }
  return false;
}

}  // namespace reflect
