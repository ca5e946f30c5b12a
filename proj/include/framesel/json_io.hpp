#pragma once

// JSON artifacts. Objects keep the field order they are written in and are
// serialized compactly on a single line followed by a newline, so identical
// values always give identical bytes.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "framesel/candidate_pool.hpp"
#include "framesel/router.hpp"
#include "framesel/selector.hpp"
#include "framesel/verification_oracle.hpp"

namespace framesel {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string to_text(const Json& j);
// Throws Format on malformed input.
Json parse_json(std::string_view text, std::string_view what);

Json pool_to_json(const CandidatePool& pool);
// Rebuilds the pool and checks that `seconds` matches the spacing rule for
// (fps, total_frames, cap); throws Alignment otherwise.
CandidatePool pool_from_json(const Json& j);
void write_pool_manifest(const std::filesystem::path& path, const CandidatePool& pool);

struct VideoManifest {
  CandidatePool pool;
  std::string relevance_embeddings;
  std::string semantic_embeddings;
  std::string query_embedding;
};

Json video_manifest_to_json(const VideoManifest& m);
VideoManifest video_manifest_from_json(const Json& j);
VideoManifest read_video_manifest(const std::filesystem::path& path);

Json preset_to_json(const Preset& p);
Preset preset_from_json(const Json& j);

Json selection_to_json(const SelectionResult& r);
SelectionResult selection_from_json(const Json& j);

Json model_to_json(const QuestionTypeModel& m);
QuestionTypeModel model_from_json(const Json& j);

Json routing_to_json(const RoutingTable& t);
RoutingTable routing_from_json(const Json& j);

Json oracle_report_to_json(const OracleReport& r);
Json property_report_to_json(const PropertyReport& r);

}  // namespace framesel
