#pragma once

// Exact enumeration and randomized property checks that certify the greedy
// selector on small instances.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "framesel/embedding_store.hpp"
#include "framesel/selector.hpp"

namespace framesel {

inline constexpr std::size_t kMaxEnumerationSize = 20;

struct Instance {
  RelevanceScores relevance;
  SimilarityMatrix similarity;
  std::size_t budget = 1;
  Preset preset;
};

struct InstanceSpec {
  std::size_t max_n = 12;
  std::size_t max_k = 4;
  std::size_t dim = 8;
  // When unset, presets rotate through all four by instance index.
  std::optional<PresetName> preset;
  double lambda = kDefaultLambda;
};

// Semantic rows uniform on the unit sphere, relevance uniform on [0, 1].
class InstanceGenerator {
 public:
  InstanceGenerator(InstanceSpec spec, std::uint64_t seed);

  Instance next();
  const InstanceSpec& spec() const noexcept { return spec_; }

 private:
  InstanceSpec spec_;
  std::mt19937_64 rng_;
  std::size_t count_ = 0;
};

// Unit-sphere rows for n candidates in `dim` dimensions.
UnitRows random_unit_rows(std::size_t n, std::size_t dim, std::mt19937_64& rng);

struct Optimum {
  double value = 0.0;
  std::vector<std::size_t> positions;  // lexicographically smallest maximizer
};

// Enumerates every subset of size <= K. Throws InstanceTooLarge when N > 20.
Optimum brute_force_optimum(const RelevanceScores& r, const SimilarityMatrix& sim,
                            std::size_t budget, const Preset& preset);

struct OracleReport {
  std::size_t index = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  Preset preset;
  double optimal_value = 0.0;
  double greedy_value = 0.0;
  double ratio = 1.0;
  std::vector<std::size_t> optimal_set;
  std::vector<std::size_t> greedy_set;
};

inline constexpr double kGreedyBound = 0.63212055882855767;  // 1 - 1/e
inline constexpr double kBoundSlack = 1e-9;

OracleReport oracle_report(const Instance& inst, std::size_t index = 0);

// Runs `trials` generated instances; throws Verification naming the first
// instance whose ratio leaves [1 - 1/e, 1].
std::vector<OracleReport> check_bound(InstanceGenerator& generator, std::size_t trials);

struct CheckCount {
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct PropertyReport {
  std::size_t trials = 0;
  CheckCount monotonicity;
  CheckCount submodularity;
  CheckCount marginal_consistency;
  CheckCount empty_set_zero;
  CheckCount matrix_validity;
  std::optional<std::string> first_counterexample;

  bool ok() const noexcept {
    return monotonicity.failed == 0 && submodularity.failed == 0 &&
           marginal_consistency.failed == 0 && empty_set_zero.failed == 0 &&
           matrix_validity.failed == 0;
  }
};

inline constexpr double kPropertyTolerance = 1e-6;
inline constexpr double kConsistencyTolerance = 1e-5;

// Checks one instance: a random A subset of B with e outside B under each of
// the four presets, marginal consistency over all candidates at a random S,
// C(empty) == 0 and similarity validity. Accumulates into `report`.
void check_instance_properties(const RelevanceScores& r, const SimilarityMatrix& sim,
                               std::mt19937_64& rng, PropertyReport& report);

PropertyReport property_suite(std::uint64_t seed, std::size_t trials, std::size_t max_n = 12,
                              std::size_t dim = 8);

}  // namespace framesel
