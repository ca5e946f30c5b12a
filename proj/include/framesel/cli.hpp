#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "framesel/embedding_store.hpp"
#include "framesel/json_io.hpp"
#include "framesel/selector.hpp"

namespace framesel::cli {

// K positions evenly spaced over [1, n] by the same truncated spacing rule as
// the candidate pool; every position when k >= n, {1} when k == 1.
std::vector<std::size_t> uniform_positions(std::size_t n, std::size_t k);

struct MethodMetrics {
  std::vector<std::size_t> positions;
  double objective = 0.0;
  double coverage = 0.0;
  double relevance = 0.0;
};

struct Comparison {
  MethodMetrics greedy;
  MethodMetrics uniform;
};

Comparison compare_selection(const RelevanceScores& r, const SimilarityMatrix& sim,
                             std::size_t budget, const Preset& preset, SelectOptions options = {});

Json comparison_to_json(const Comparison& c, const std::string& video_id, const Preset& preset,
                        std::size_t budget, bool coverage_normalized);

// Runs the command line. Errors are reported on `err` as a single line
// `error:<exit code>:<kind>: <message>` and returned as the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace framesel::cli
