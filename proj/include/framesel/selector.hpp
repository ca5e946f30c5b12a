#pragma once

// Greedy maximization of F(S) = alpha * R(S) + beta * C(S) under |S| <= K.
//
//   R(S) = sum_{i in S} r_i
//   C(S) = sum_j ( max(-1, max_{i in S} s(j, i)) + 1 )
//
// Positions in this interface are 1-based, matching CandidatePool.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framesel/candidate_pool.hpp"
#include "framesel/embedding_store.hpp"

namespace framesel {

inline constexpr double kCoverageBaseline = -1.0;
inline constexpr double kDefaultLambda = 0.5;
inline constexpr std::size_t kDefaultBudget = 32;

enum class PresetName { RelevanceOnly, RelevanceOriented, CoverageOriented, CoverageOnly };

// Fixed order, also used to break ties when fitting routing tables.
inline constexpr std::array<PresetName, 4> kPresetOrder = {
    PresetName::RelevanceOnly, PresetName::RelevanceOriented, PresetName::CoverageOriented,
    PresetName::CoverageOnly};

std::string_view to_string(PresetName name) noexcept;
PresetName parse_preset_name(std::string_view name);

struct Preset {
  PresetName name = PresetName::RelevanceOnly;
  double alpha = 1.0;
  double beta = 0.0;
  double lambda = kDefaultLambda;

  bool operator==(const Preset&) const = default;
};

// relevance_only (1, 0); coverage_only (0, 1); relevance_oriented (1, lambda);
// coverage_oriented (lambda, 1). Oriented presets need lambda in (0, 1).
Preset make_preset(PresetName name, double lambda = kDefaultLambda);

struct ObjectiveOptions {
  // Divide the coverage term by N so that it lives in [0, 2].
  bool normalize_coverage = false;
};

class CoverageState {
 public:
  explicit CoverageState(std::size_t n);

  std::size_t size() const noexcept { return coverage_.size(); }
  std::span<const double> coverage() const noexcept { return coverage_; }
  bool contains(std::size_t position) const;
  const std::vector<std::size_t>& selected() const noexcept { return selected_; }

  // C(S) for the current set.
  double coverage_value() const;

  // Adds a position and raises c_j to s(j, position). Throws Duplicate/Index.
  void add(std::size_t position, const SimilarityMatrix& sim);

 private:
  std::vector<double> coverage_;
  std::vector<bool> in_set_;
  std::vector<std::size_t> selected_;
};

double relevance_value(std::span<const std::size_t> positions, const RelevanceScores& r);
double coverage_value(std::span<const std::size_t> positions, const SimilarityMatrix& sim);

double objective_value(std::span<const std::size_t> positions, const RelevanceScores& r,
                       const SimilarityMatrix& sim, const Preset& preset,
                       ObjectiveOptions options = {});

// Sum over j of max(c_j, s(j, e)) - c_j.
double coverage_gain(std::size_t position, const CoverageState& state,
                     const SimilarityMatrix& sim);

double marginal_gain(std::size_t position, const CoverageState& state, const RelevanceScores& r,
                     const SimilarityMatrix& sim, const Preset& preset,
                     ObjectiveOptions options = {});

struct SelectOptions {
  bool normalize_coverage = false;
  // Priority-queue evaluation with stale upper bounds; selections are
  // bit-identical to the plain engine.
  bool lazy = false;
};

struct SelectionResult {
  std::string video_id;
  Preset preset;
  std::size_t budget = 0;
  std::vector<std::size_t> positions;  // ascending
  std::vector<std::uint64_t> seconds;
  std::vector<std::uint64_t> frame_indices;
  std::vector<std::size_t> selection_order;  // positions in pick order
  std::vector<double> gains;                 // per pick, in pick order
  double objective = 0.0;
  bool coverage_normalized = false;
};

// Greedy selection without pool mapping; returns positions in pick order and
// fills `gains` alongside.
std::vector<std::size_t> greedy_order(const RelevanceScores& r, const SimilarityMatrix& sim,
                                      std::size_t budget, const Preset& preset,
                                      SelectOptions options, std::vector<double>* gains = nullptr);

SelectionResult select(const RelevanceScores& r, const SimilarityMatrix& sim, std::size_t budget,
                       const Preset& preset, const CandidatePool& pool,
                       SelectOptions options = {});

}  // namespace framesel
