#include "framesel/embedding_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "framesel/error.hpp"
#include "framesel/json_io.hpp"

namespace framesel {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'F', 'S', 'E', 'L'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[offset + b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const FloatMatrix& m) {
  if (m.values.size() != static_cast<std::size_t>(m.rows) * m.dim) {
    throw Error(ErrorKind::Format, "matrix value count does not match rows * dim");
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(kHeaderBytes + m.values.size() * 4);
  put_u32(out, kEmbeddingFormatVersion);
  put_u32(out, m.rows);
  put_u32(out, m.dim);
  for (float f : m.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FloatMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorKind::Format, "embedding file truncated: " + std::to_string(bytes.size()) +
                                       " bytes, header needs 16");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorKind::Format, "bad embedding magic (expected FSEL)");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorKind::Format,
                "unsupported embedding format version " + std::to_string(version));
  }
  FloatMatrix m;
  m.rows = get_u32(bytes, 8);
  m.dim = get_u32(bytes, 12);
  const std::uint64_t count = static_cast<std::uint64_t>(m.rows) * m.dim;
  const std::uint64_t expected = kHeaderBytes + count * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::Format, "embedding payload is " + std::to_string(bytes.size()) +
                                       " bytes, header implies " + std::to_string(expected));
  }
  m.values.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    m.values[k] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * k));
  }
  return m;
}

FloatMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_matrix(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const FloatMatrix& m) {
  const auto bytes = encode_matrix(m);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

UnitRows normalize_rows(const FloatMatrix& m, std::string_view what) {
  UnitRows out;
  out.rows = m.rows;
  out.dim = m.dim;
  out.values.assign(m.values.begin(), m.values.end());
  return normalize_rows(out, what);
}

UnitRows normalize_rows(const UnitRows& m, std::string_view what) {
  UnitRows out = m;
  for (std::size_t r = 0; r < out.rows; ++r) {
    double* row = out.values.data() + r * out.dim;
    double sq = 0.0;
    for (std::size_t k = 0; k < out.dim; ++k) sq += row[k] * row[k];
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::DegenerateEmbedding,
                  std::string(what) + " row " + std::to_string(r + 1) +
                      " has zero or non-finite norm");
    }
    for (std::size_t k = 0; k < out.dim; ++k) row[k] /= norm;
  }
  return out;
}

EmbeddingSet::EmbeddingSet(std::string video_id, const FloatMatrix& relevance,
                           const FloatMatrix& query, const FloatMatrix& semantic)
    : video_id_(std::move(video_id)) {
  if (relevance.rows != semantic.rows) {
    throw Error(ErrorKind::Alignment, "relevance embeddings have " +
                                          std::to_string(relevance.rows) +
                                          " rows but semantic embeddings have " +
                                          std::to_string(semantic.rows));
  }
  if (query.rows != 1) {
    throw Error(ErrorKind::Alignment,
                "query embedding must have exactly 1 row, got " + std::to_string(query.rows));
  }
  if (query.dim != relevance.dim) {
    throw Error(ErrorKind::Alignment, "query dimension " + std::to_string(query.dim) +
                                          " differs from relevance dimension " +
                                          std::to_string(relevance.dim));
  }
  relevance_ = normalize_rows(relevance, "relevance embedding");
  query_ = normalize_rows(query, "query embedding");
  semantic_ = normalize_rows(semantic, "semantic embedding");
}

std::string_view to_string(RelevanceMode mode) noexcept {
  switch (mode) {
    case RelevanceMode::RawRelu: return "raw_relu";
    case RelevanceMode::ZscoreReluMaxnorm: return "zscore_relu_maxnorm";
  }
  return "raw_relu";
}

RelevanceMode parse_relevance_mode(std::string_view name) {
  if (name == "raw_relu") return RelevanceMode::RawRelu;
  if (name == "zscore_relu_maxnorm") return RelevanceMode::ZscoreReluMaxnorm;
  throw Error(ErrorKind::Parameter, "unknown relevance mode '" + std::string(name) + "'");
}

std::vector<double> relevance_cosines(const EmbeddingSet& es) {
  const auto t = es.query();
  std::vector<double> c(es.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto v = es.relevance().row(i);
    double dot = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * t[k];
    c[i] = dot;
  }
  return c;
}

RelevanceScores relevance_from_cosines(std::span<const double> cosines, RelevanceMode mode) {
  RelevanceScores out;
  out.mode = mode;
  out.scores.assign(cosines.size(), 0.0);
  if (mode == RelevanceMode::RawRelu) {
    for (std::size_t i = 0; i < cosines.size(); ++i) out.scores[i] = std::max(cosines[i], 0.0);
    return out;
  }
  if (cosines.empty()) return out;
  const double n = static_cast<double>(cosines.size());
  double mean = 0.0;
  for (double c : cosines) mean += c;
  mean /= n;
  double var = 0.0;
  for (double c : cosines) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) return out;
  double peak = 0.0;
  for (std::size_t i = 0; i < cosines.size(); ++i) {
    out.scores[i] = std::max((cosines[i] - mean) / sd, 0.0);
    peak = std::max(peak, out.scores[i]);
  }
  if (peak > 0.0) {
    for (double& s : out.scores) s /= peak;
  }
  return out;
}

RelevanceScores relevance_scores(const EmbeddingSet& es, RelevanceMode mode) {
  const auto c = relevance_cosines(es);
  return relevance_from_cosines(c, mode);
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, std::span<const double> row_major) : n_(n) {
  if (row_major.size() != n * n) {
    throw Error(ErrorKind::Alignment, "similarity values do not form an N x N matrix");
  }
  cols_.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) cols_[i * n + j] = row_major[j * n + i];
  }
}

SimilarityMatrix similarity_matrix(const UnitRows& rows) {
  SimilarityMatrix sim;
  const std::size_t n = rows.rows;
  sim.n_ = n;
  sim.cols_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = rows.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const auto dj = rows.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < rows.dim; ++k) dot += dj[k] * di[k];
      sim.cols_[i * n + j] = dot;
      sim.cols_[j * n + i] = dot;
    }
  }
  return sim;
}

SimilarityIssues check_similarity(const SimilarityMatrix& sim) {
  SimilarityIssues issues;
  const std::size_t n = sim.size();
  for (std::size_t j = 0; j < n; ++j) {
    issues.max_diagonal_error = std::max(issues.max_diagonal_error, std::abs(sim.at(j, j) - 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double v = sim.at(j, i);
      issues.max_asymmetry = std::max(issues.max_asymmetry, std::abs(v - sim.at(i, j)));
      issues.max_out_of_range = std::max(issues.max_out_of_range, std::abs(v) - 1.0);
    }
  }
  return issues;
}

VideoInputs load_embeddings(const std::filesystem::path& manifest_path) {
  const VideoManifest manifest = read_video_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : base / p; };

  const FloatMatrix relevance = read_matrix(resolve(manifest.relevance_embeddings));
  const FloatMatrix semantic = read_matrix(resolve(manifest.semantic_embeddings));
  const FloatMatrix query = read_matrix(resolve(manifest.query_embedding));

  const std::size_t n = manifest.pool.size();
  if (relevance.rows != n) {
    throw Error(ErrorKind::Alignment, "relevance embeddings have " +
                                          std::to_string(relevance.rows) +
                                          " rows but the pool has " + std::to_string(n));
  }
  if (semantic.rows != n) {
    throw Error(ErrorKind::Alignment, "semantic embeddings have " +
                                          std::to_string(semantic.rows) +
                                          " rows but the pool has " + std::to_string(n));
  }
  EmbeddingSet es(manifest.pool.meta().video_id, relevance, query, semantic);
  return VideoInputs{manifest.pool, std::move(es)};
}

}  // namespace framesel
