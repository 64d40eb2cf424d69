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

#include "reflect/record.h"

#include <fstream>

#include "reflect/corpus.h"
#include "reflect/text.h"

namespace reflect {
namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T, typename F>
ordered_json OptionalJson(const std::optional<T>& value, F&& convert) {
  return value ? convert(*value) : ordered_json(nullptr);
}

ordered_json BleuJson(const BleuScore& s) {
  return {{"score", s.score},
          {"precisions", s.precisions},
          {"brevity_penalty", s.brevity_penalty},
          {"hyp_len", s.hyp_len},
          {"ref_len", s.ref_len}};
}

ordered_json SemanticJson(const SemanticScore& s) {
  return {{"score", s.score},
          {"scorer_id", s.scorer_id},
          {"reference_used", s.reference_used}};
}

std::optional<std::string> OptString(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::optional<BleuScore> OptBleu(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const auto& b = j[key];
  return BleuScore{b.at("score").get<double>(),
                   b.at("precisions").get<std::vector<double>>(),
                   b.at("brevity_penalty").get<double>(),
                   b.at("hyp_len").get<int64_t>(), b.at("ref_len").get<int64_t>()};
}

std::optional<SemanticScore> OptSemantic(const nlohmann::json& j,
                                         const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const auto& s = j[key];
  return SemanticScore{s.at("score").get<double>(),
                       s.at("scorer_id").get<std::string>(),
                       s.at("reference_used").get<bool>()};
}

}  // namespace

ordered_json RecordToJson(const TranslationRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["source"] = r.source_text;
  j["reference"] = r.reference_text;
  j["draft"] = OptionalJson(r.draft, [](const std::string& s) { return ordered_json(s); });
  j["critique_raw"] = OptionalJson(
      r.reflection, [](const Reflection& x) { return ordered_json(x.raw_text); });
  j["critique_masked"] = OptionalJson(
      r.reflection, [](const Reflection& x) { return ordered_json(x.masked_text); });
  j["revision"] =
      OptionalJson(r.revision, [](const std::string& s) { return ordered_json(s); });
  j["draft_bleu"] = OptionalJson(r.draft_bleu, BleuJson);
  j["revision_bleu"] = OptionalJson(r.revision_bleu, BleuJson);
  j["draft_semantic"] = OptionalJson(r.draft_semantic, SemanticJson);
  j["revision_semantic"] = OptionalJson(r.revision_semantic, SemanticJson);
  j["gated"] = r.gated;
  j["strategy"] = StrategyName(r.strategy);
  j["model"] = r.model_name;
  j["error"] =
      OptionalJson(r.error, [](const std::string& s) { return ordered_json(s); });
  return j;
}

ordered_json TupleToJson(const TranslationRecord& r) {
  ordered_json record = RecordToJson(r);
  ordered_json j;
  for (auto it = record.begin(); it != record.end(); ++it) {
    j[it.key()] = it.value();
    if (it.key() == "draft") j["critique"] = record["critique_masked"];
  }
  return j;
}

TranslationRecord RecordFromJson(const nlohmann::json& j) {
  TranslationRecord r;
  r.id = j.at("id").get<std::string>();
  r.source_text = j.at("source").get<std::string>();
  r.reference_text = j.at("reference").get<std::string>();
  r.draft = OptString(j, "draft");
  if (auto raw = OptString(j, "critique_raw")) {
    Reflection reflection;
    try {
      reflection = ParseReflection(*raw);
    } catch (const SectionMissing&) {
      reflection.raw_text = *raw;
    }
    reflection.masked_text = OptString(j, "critique_masked").value_or("");
    r.reflection = std::move(reflection);
  }
  r.revision = OptString(j, "revision");
  r.draft_bleu = OptBleu(j, "draft_bleu");
  r.revision_bleu = OptBleu(j, "revision_bleu");
  r.draft_semantic = OptSemantic(j, "draft_semantic");
  r.revision_semantic = OptSemantic(j, "revision_semantic");
  r.gated = j.at("gated").get<bool>();
  r.strategy = ParseStrategy(j.at("strategy").get<std::string>());
  r.model_name = j.at("model").get<std::string>();
  r.error = OptString(j, "error");
  return r;
}

std::string DumpLine(const ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::vector<TranslationRecord> LoadRecordLog(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  std::ifstream in(path, std::ios::binary);
  std::vector<TranslationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    try {
      out.push_back(RecordFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return out;
}

std::size_t EmitTupleDataset(std::span<const TranslationRecord> records,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  std::size_t written = 0;
  for (const auto& r : records) {
    out << DumpLine(TupleToJson(r)) << '\n';
    ++written;
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
  return written;
}

}  // namespace reflect
