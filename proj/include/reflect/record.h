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

#ifndef REFLECT_RECORD_H_
#define REFLECT_RECORD_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reflect/metrics.h"
#include "reflect/prompts.h"
#include "reflect/reflection.h"

namespace reflect {

// One sentence's trip through the reflective loop: the (source, draft,
// critique, revision) tuple plus scores and the gate decision.
//
// gated == false implies no reflection and no revision; a revision implies
// a reflection with non-empty masked text.
struct TranslationRecord {
  std::string id;
  std::string source_text;
  std::string reference_text;
  Strategy strategy = Strategy::kBaseline;
  std::string model_name;

  std::optional<std::string> draft;  // absent when the first pass failed
  std::optional<BleuScore> draft_bleu;
  std::optional<SemanticScore> draft_semantic;

  bool gated = false;
  std::optional<Reflection> reflection;
  std::optional<std::string> revision;
  std::optional<BleuScore> revision_bleu;
  std::optional<SemanticScore> revision_semantic;

  std::optional<std::string> error;
};

// Record-log line. Keys, in order: id, source, reference, draft,
// critique_raw, critique_masked, revision, draft_bleu, revision_bleu,
// draft_semantic, revision_semantic, gated, strategy, model, error.
// Missing values are explicit nulls.
nlohmann::ordered_json RecordToJson(const TranslationRecord& record);
TranslationRecord RecordFromJson(const nlohmann::json& j);

// The released tuple dataset uses the record-log schema plus "critique",
// the masked critique handed to the second pass.
nlohmann::ordered_json TupleToJson(const TranslationRecord& record);

// Compact single-line dump; invalid UTF-8 is replaced rather than thrown on.
std::string DumpLine(const nlohmann::ordered_json& j);

std::vector<TranslationRecord> LoadRecordLog(const std::filesystem::path& path);

// Writes one tuple per record (including ungated ones, with null revision)
// and returns the number of lines written.
std::size_t EmitTupleDataset(std::span<const TranslationRecord> records,
                             const std::filesystem::path& path);

}  // namespace reflect

#endif  // REFLECT_RECORD_H_
