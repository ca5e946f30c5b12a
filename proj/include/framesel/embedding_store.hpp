#pragma once

// Precomputed per-candidate embeddings in two spaces: a relevance space shared
// with the query text embedding, and a semantic space used for coverage.
//
// Binary matrix files are little-endian:
//   bytes 0-3   magic "FSEL"
//   bytes 4-7   u32 version (1)
//   bytes 8-11  u32 rows
//   bytes 12-15 u32 dim
//   rows * dim  f32, row-major; nothing after.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "framesel/candidate_pool.hpp"

namespace framesel {

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

struct FloatMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;  // row-major, rows * dim

  std::span<const float> row(std::size_t r) const {
    return {values.data() + r * dim, dim};
  }
};

std::vector<std::uint8_t> encode_matrix(const FloatMatrix& m);
FloatMatrix decode_matrix(std::span<const std::uint8_t> bytes);
FloatMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const FloatMatrix& m);

// Row-major matrix of doubles with unit-norm rows.
struct UnitRows {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * dim, dim};
  }
};

// L2-normalizes each row in double precision. Throws DegenerateEmbedding naming
// the first zero-norm (or non-finite) row; `what` labels the matrix in messages.
UnitRows normalize_rows(const FloatMatrix& m, std::string_view what);
UnitRows normalize_rows(const UnitRows& m, std::string_view what);

class EmbeddingSet {
 public:
  // Normalizes all inputs. Throws Alignment if relevance and semantic row counts
  // differ, if the query is not a single row, or if its dimension differs from
  // the relevance dimension.
  EmbeddingSet(std::string video_id, const FloatMatrix& relevance, const FloatMatrix& query,
               const FloatMatrix& semantic);

  const std::string& video_id() const noexcept { return video_id_; }
  std::size_t size() const noexcept { return relevance_.rows; }
  const UnitRows& relevance() const noexcept { return relevance_; }
  std::span<const double> query() const noexcept { return query_.row(0); }
  const UnitRows& semantic() const noexcept { return semantic_; }

 private:
  std::string video_id_;
  UnitRows relevance_;
  UnitRows query_;
  UnitRows semantic_;
};

enum class RelevanceMode { RawRelu, ZscoreReluMaxnorm };

std::string_view to_string(RelevanceMode mode) noexcept;
RelevanceMode parse_relevance_mode(std::string_view name);

struct RelevanceScores {
  std::vector<double> scores;
  RelevanceMode mode = RelevanceMode::RawRelu;

  std::size_t size() const noexcept { return scores.size(); }
};

// Raw cosines <v_i, t>.
std::vector<double> relevance_cosines(const EmbeddingSet& es);
RelevanceScores relevance_scores(const EmbeddingSet& es,
                                 RelevanceMode mode = RelevanceMode::RawRelu);
// Mode pipeline applied to a given vector of cosines.
RelevanceScores relevance_from_cosines(std::span<const double> cosines, RelevanceMode mode);

// Dense N x N similarity s(j, i) = <d_j, d_i>. Stored so that column i (all j
// for a fixed candidate i) is contiguous.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // values given row-major in (j, i) order: values[j * n + i] = s(j, i).
  SimilarityMatrix(std::size_t n, std::span<const double> row_major);

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t j, std::size_t i) const noexcept { return cols_[i * n_ + j]; }
  // s(., i) for candidate i, indexed by j.
  std::span<const double> column(std::size_t i) const noexcept {
    return {cols_.data() + i * n_, n_};
  }

 private:
  friend SimilarityMatrix similarity_matrix(const UnitRows& rows);
  std::size_t n_ = 0;
  std::vector<double> cols_;
};

SimilarityMatrix similarity_matrix(const UnitRows& rows);
inline SimilarityMatrix similarity_matrix(const EmbeddingSet& es) {
  return similarity_matrix(es.semantic());
}

struct SimilarityIssues {
  double max_asymmetry = 0.0;
  double max_diagonal_error = 0.0;
  double max_out_of_range = 0.0;
  bool ok(double sym_tol = 1e-5, double diag_tol = 1e-5, double range_tol = 1e-6) const {
    return max_asymmetry <= sym_tol && max_diagonal_error <= diag_tol &&
           max_out_of_range <= range_tol;
  }
};

SimilarityIssues check_similarity(const SimilarityMatrix& sim);

struct VideoInputs {
  CandidatePool pool;
  EmbeddingSet embeddings;
};

// Reads a pool manifest extended with `relevance_embeddings`,
// `semantic_embeddings` and `query_embedding` paths (relative paths resolve
// against the manifest's directory) and checks every matrix against the pool.
VideoInputs load_embeddings(const std::filesystem::path& manifest_path);

}  // namespace framesel
