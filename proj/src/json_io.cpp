#include "framesel/json_io.hpp"

#include <fstream>
#include <iterator>
#include <random>
#include <system_error>

#include "framesel/error.hpp"

namespace framesel {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorKind::Format, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Format, std::string("missing key '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
  }
}

std::string to_text(const Json& j) { return j.dump() + "\n"; }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string(what) + ": " + e.what());
  }
}

Json pool_to_json(const CandidatePool& pool) {
  Json j;
  j["video_id"] = pool.meta().video_id;
  j["fps"] = pool.meta().fps;
  j["total_frames"] = pool.meta().total_frames;
  j["cap"] = pool.cap();
  j["seconds"] = pool.seconds();
  return j;
}

CandidatePool pool_from_json(const Json& j) {
  VideoMeta meta{get<std::string>(j, "video_id"), get<double>(j, "fps"),
                 get<std::uint64_t>(j, "total_frames")};
  const auto cap = get<std::size_t>(j, "cap");
  auto seconds = get<std::vector<std::uint64_t>>(j, "seconds");
  CandidatePool pool(meta, cap, std::move(seconds));
  if (build_pool(meta, cap).seconds() != pool.seconds()) {
    throw Error(ErrorKind::Alignment,
                "manifest seconds do not follow the candidate spacing rule for this video");
  }
  return pool;
}

void write_pool_manifest(const std::filesystem::path& path, const CandidatePool& pool) {
  write_file_atomic(path, to_text(pool_to_json(pool)));
}

Json video_manifest_to_json(const VideoManifest& m) {
  Json j = pool_to_json(m.pool);
  j["relevance_embeddings"] = m.relevance_embeddings;
  j["semantic_embeddings"] = m.semantic_embeddings;
  j["query_embedding"] = m.query_embedding;
  return j;
}

VideoManifest video_manifest_from_json(const Json& j) {
  return VideoManifest{pool_from_json(j), get<std::string>(j, "relevance_embeddings"),
                       get<std::string>(j, "semantic_embeddings"),
                       get<std::string>(j, "query_embedding")};
}

VideoManifest read_video_manifest(const std::filesystem::path& path) {
  try {
    return video_manifest_from_json(parse_json(read_text_file(path), path.string()));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Json preset_to_json(const Preset& p) {
  Json j;
  j["name"] = to_string(p.name);
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  return j;
}

Preset preset_from_json(const Json& j) {
  Preset p;
  p.name = parse_preset_name(get<std::string>(j, "name"));
  p.alpha = get<double>(j, "alpha");
  p.beta = get<double>(j, "beta");
  p.lambda = get<double>(j, "lambda");
  return p;
}

Json selection_to_json(const SelectionResult& r) {
  Json j;
  j["video_id"] = r.video_id;
  j["preset"] = preset_to_json(r.preset);
  j["budget"] = r.budget;
  j["positions"] = r.positions;
  j["seconds"] = r.seconds;
  j["frame_indices"] = r.frame_indices;
  j["gains"] = r.gains;
  j["objective"] = r.objective;
  j["coverage_normalized"] = r.coverage_normalized;
  return j;
}

SelectionResult selection_from_json(const Json& j) {
  SelectionResult r;
  r.video_id = get<std::string>(j, "video_id");
  r.preset = preset_from_json(field(j, "preset"));
  r.budget = get<std::size_t>(j, "budget");
  r.positions = get<std::vector<std::size_t>>(j, "positions");
  r.seconds = get<std::vector<std::uint64_t>>(j, "seconds");
  r.frame_indices = get<std::vector<std::uint64_t>>(j, "frame_indices");
  r.gains = get<std::vector<double>>(j, "gains");
  r.objective = get<double>(j, "objective");
  r.coverage_normalized = get<bool>(j, "coverage_normalized");
  if (r.seconds.size() != r.positions.size() || r.frame_indices.size() != r.positions.size() ||
      r.gains.size() != r.positions.size()) {
    throw Error(ErrorKind::Format, "selection arrays differ in length");
  }
  return r;
}

Json model_to_json(const QuestionTypeModel& m) {
  Json j;
  j["types"] = m.types();
  Json vocab = Json::object();
  // Emit in column order so the file reads like the weight layout.
  std::vector<const std::string*> by_col(m.vocabulary().size());
  for (const auto& [tok, col] : m.vocabulary()) by_col[col] = &tok;
  for (std::size_t c = 0; c < by_col.size(); ++c) vocab[*by_col[c]] = c;
  j["vocabulary"] = std::move(vocab);
  j["weights"] = m.weights();
  Json feat;
  feat["lowercase"] = true;
  feat["split"] = "non_alphanumeric";
  feat["features"] = "token_counts";
  feat["bias"] = "last_column";
  j["featurization"] = std::move(feat);
  return j;
}

QuestionTypeModel model_from_json(const Json& j) {
  auto types = get<std::vector<std::string>>(j, "types");
  const Json& vj = field(j, "vocabulary");
  if (!vj.is_object()) throw Error(ErrorKind::Format, "vocabulary must be an object");
  std::map<std::string, std::size_t> vocab;
  for (const auto& [tok, col] : vj.items()) {
    if (!col.is_number_unsigned()) throw Error(ErrorKind::Format, "vocabulary index not unsigned");
    vocab.emplace(tok, col.get<std::size_t>());
  }
  const Json& feat = field(j, "featurization");
  if (get<std::string>(feat, "features") != "token_counts" ||
      get<std::string>(feat, "split") != "non_alphanumeric" || !get<bool>(feat, "lowercase")) {
    throw Error(ErrorKind::Format, "unsupported featurization");
  }
  return QuestionTypeModel(std::move(types), std::move(vocab),
                           get<std::vector<double>>(j, "weights"));
}

Json routing_to_json(const RoutingTable& t) {
  Json j;
  Json mapping = Json::object();
  for (const auto& [type, preset] : t.mapping) mapping[type] = to_string(preset);
  Json prov = Json::object();
  for (const auto& [type, row] : t.provenance) {
    Json r = Json::object();
    for (PresetName p : kPresetOrder) {
      const auto it = row.find(p);
      if (it != row.end()) r[std::string(to_string(p))] = it->second;
    }
    prov[type] = std::move(r);
  }
  j["mapping"] = std::move(mapping);
  j["provenance"] = std::move(prov);
  return j;
}

RoutingTable routing_from_json(const Json& j) {
  RoutingTable t;
  const Json& mapping = field(j, "mapping");
  const Json& prov = field(j, "provenance");
  if (!mapping.is_object() || !prov.is_object()) {
    throw Error(ErrorKind::Format, "routing mapping and provenance must be objects");
  }
  for (const auto& [type, name] : mapping.items()) {
    if (!name.is_string()) throw Error(ErrorKind::Format, "routing entry must be a preset name");
    t.mapping.emplace(type, parse_preset_name(name.get<std::string>()));
  }
  for (const auto& [type, row] : prov.items()) {
    if (!row.is_object()) throw Error(ErrorKind::Format, "provenance row must be an object");
    auto& out = t.provenance[type];
    for (const auto& [name, acc] : row.items()) {
      if (!acc.is_number()) throw Error(ErrorKind::Format, "provenance accuracy not a number");
      out[parse_preset_name(name)] = acc.get<double>();
    }
  }
  return t;
}

Json oracle_report_to_json(const OracleReport& r) {
  Json j;
  j["index"] = r.index;
  j["n"] = r.n;
  j["k"] = r.k;
  j["preset"] = preset_to_json(r.preset);
  j["optimal_value"] = r.optimal_value;
  j["greedy_value"] = r.greedy_value;
  j["ratio"] = r.ratio;
  j["optimal_set"] = r.optimal_set;
  j["greedy_set"] = r.greedy_set;
  return j;
}

Json property_report_to_json(const PropertyReport& r) {
  auto count = [](const CheckCount& c) {
    Json j;
    j["passed"] = c.passed;
    j["failed"] = c.failed;
    return j;
  };
  Json j;
  j["trials"] = r.trials;
  j["monotonicity"] = count(r.monotonicity);
  j["submodularity"] = count(r.submodularity);
  j["marginal_consistency"] = count(r.marginal_consistency);
  j["empty_set_zero"] = count(r.empty_set_zero);
  j["matrix_validity"] = count(r.matrix_validity);
  j["ok"] = r.ok();
  j["first_counterexample"] =
      r.first_counterexample ? Json(*r.first_counterexample) : Json(nullptr);
  return j;
}

}  // namespace framesel
