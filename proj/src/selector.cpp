#include "framesel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "framesel/error.hpp"

namespace framesel {
namespace {

void check_position(std::size_t position, std::size_t n) {
  if (position < 1 || position > n) {
    throw Error(ErrorKind::Index, "position " + std::to_string(position) + " outside [1, " +
                                      std::to_string(n) + "]");
  }
}

void check_sizes(const RelevanceScores& r, const SimilarityMatrix& sim) {
  if (r.size() != sim.size()) {
    throw Error(ErrorKind::Alignment, "relevance has " + std::to_string(r.size()) +
                                          " entries but similarity is " +
                                          std::to_string(sim.size()) + " x " +
                                          std::to_string(sim.size()));
  }
}

double coverage_weight(const Preset& preset, std::size_t n, bool normalize) {
  return normalize && n > 0 ? preset.beta / static_cast<double>(n) : preset.beta;
}

}  // namespace

std::string_view to_string(PresetName name) noexcept {
  switch (name) {
    case PresetName::RelevanceOnly: return "relevance_only";
    case PresetName::RelevanceOriented: return "relevance_oriented";
    case PresetName::CoverageOriented: return "coverage_oriented";
    case PresetName::CoverageOnly: return "coverage_only";
  }
  return "relevance_only";
}

PresetName parse_preset_name(std::string_view name) {
  for (PresetName p : kPresetOrder) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorKind::Parameter, "unknown preset '" + std::string(name) + "'");
}

Preset make_preset(PresetName name, double lambda) {
  const bool oriented =
      name == PresetName::RelevanceOriented || name == PresetName::CoverageOriented;
  if (oriented && !(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::Parameter,
                "lambda must lie in (0, 1) for " + std::string(to_string(name)) + ", got " +
                    std::to_string(lambda));
  }
  switch (name) {
    case PresetName::RelevanceOnly: return {name, 1.0, 0.0, lambda};
    case PresetName::CoverageOnly: return {name, 0.0, 1.0, lambda};
    case PresetName::RelevanceOriented: return {name, 1.0, lambda, lambda};
    case PresetName::CoverageOriented: return {name, lambda, 1.0, lambda};
  }
  return {};
}

CoverageState::CoverageState(std::size_t n) : coverage_(n, kCoverageBaseline), in_set_(n, false) {}

bool CoverageState::contains(std::size_t position) const {
  check_position(position, coverage_.size());
  return in_set_[position - 1];
}

double CoverageState::coverage_value() const {
  double total = 0.0;
  for (double c : coverage_) total += c - kCoverageBaseline;
  return total;
}

void CoverageState::add(std::size_t position, const SimilarityMatrix& sim) {
  if (contains(position)) {
    throw Error(ErrorKind::Duplicate, "position " + std::to_string(position) +
                                          " is already selected");
  }
  const auto col = sim.column(position - 1);
  for (std::size_t j = 0; j < coverage_.size(); ++j) coverage_[j] = std::max(coverage_[j], col[j]);
  in_set_[position - 1] = true;
  selected_.push_back(position);
}

double relevance_value(std::span<const std::size_t> positions, const RelevanceScores& r) {
  double total = 0.0;
  for (std::size_t p : positions) {
    check_position(p, r.size());
    total += r.scores[p - 1];
  }
  return total;
}

double coverage_value(std::span<const std::size_t> positions, const SimilarityMatrix& sim) {
  const std::size_t n = sim.size();
  for (std::size_t p : positions) check_position(p, n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double best = kCoverageBaseline;
    for (std::size_t p : positions) best = std::max(best, sim.at(j, p - 1));
    total += best - kCoverageBaseline;
  }
  return total;
}

double objective_value(std::span<const std::size_t> positions, const RelevanceScores& r,
                       const SimilarityMatrix& sim, const Preset& preset,
                       ObjectiveOptions options) {
  check_sizes(r, sim);
  if (positions.empty()) return 0.0;
  const double rel = relevance_value(positions, r);
  const double cov = coverage_value(positions, sim);
  return preset.alpha * rel +
         coverage_weight(preset, sim.size(), options.normalize_coverage) * cov;
}

double coverage_gain(std::size_t position, const CoverageState& state,
                     const SimilarityMatrix& sim) {
  const auto col = sim.column(position - 1);
  const auto c = state.coverage();
  double gain = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) gain += std::max(c[j], col[j]) - c[j];
  return gain;
}

double marginal_gain(std::size_t position, const CoverageState& state, const RelevanceScores& r,
                     const SimilarityMatrix& sim, const Preset& preset,
                     ObjectiveOptions options) {
  check_sizes(r, sim);
  if (state.size() != sim.size()) {
    throw Error(ErrorKind::Alignment, "coverage state size differs from similarity size");
  }
  if (state.contains(position)) {
    throw Error(ErrorKind::Duplicate, "position " + std::to_string(position) +
                                          " is already selected");
  }
  return preset.alpha * r.scores[position - 1] +
         coverage_weight(preset, sim.size(), options.normalize_coverage) *
             coverage_gain(position, state, sim);
}

namespace {

struct Bound {
  double value;
  std::size_t position;
  std::size_t step;  // step at which value was computed
};

// Max-heap on value, smallest position first among equal values.
struct BoundLess {
  bool operator()(const Bound& a, const Bound& b) const {
    if (a.value != b.value) return a.value < b.value;
    return a.position > b.position;
  }
};

}  // namespace

std::vector<std::size_t> greedy_order(const RelevanceScores& r, const SimilarityMatrix& sim,
                                      std::size_t budget, const Preset& preset,
                                      SelectOptions options, std::vector<double>* gains) {
  if (budget < 1) throw Error(ErrorKind::Budget, "budget K must be at least 1");
  check_sizes(r, sim);
  const std::size_t n = sim.size();
  if (n == 0) throw Error(ErrorKind::EmptyPool, "no candidates to select from");
  const std::size_t steps = std::min(budget, n);
  const double w_cov = coverage_weight(preset, n, options.normalize_coverage);

  CoverageState state(n);
  std::vector<std::size_t> order;
  order.reserve(steps);
  if (gains) gains->clear();

  auto gain_of = [&](std::size_t p) {
    return preset.alpha * r.scores[p - 1] + w_cov * coverage_gain(p, state, sim);
  };

  if (!options.lazy) {
    for (std::size_t step = 0; step < steps; ++step) {
      std::size_t best = 0;
      double best_gain = 0.0;
      for (std::size_t p = 1; p <= n; ++p) {
        if (state.contains(p)) continue;
        const double g = gain_of(p);
        if (best == 0 || g > best_gain) {
          best = p;
          best_gain = g;
        }
      }
      state.add(best, sim);
      order.push_back(best);
      if (gains) gains->push_back(best_gain);
    }
    return order;
  }

  // Stale gains upper-bound fresh ones: each term max(c_j, s) - c_j is
  // non-increasing in c_j under round-to-nearest, and so is their sum.
  std::priority_queue<Bound, std::vector<Bound>, BoundLess> heap;
  for (std::size_t p = 1; p <= n; ++p) heap.push({gain_of(p), p, 0});
  for (std::size_t step = 0; step < steps; ++step) {
    while (true) {
      Bound top = heap.top();
      heap.pop();
      if (top.step == step) {
        state.add(top.position, sim);
        order.push_back(top.position);
        if (gains) gains->push_back(top.value);
        break;
      }
      heap.push({gain_of(top.position), top.position, step});
    }
  }
  return order;
}

SelectionResult select(const RelevanceScores& r, const SimilarityMatrix& sim, std::size_t budget,
                       const Preset& preset, const CandidatePool& pool, SelectOptions options) {
  if (budget < 1) throw Error(ErrorKind::Budget, "budget K must be at least 1");
  if (pool.size() != sim.size()) {
    throw Error(ErrorKind::Alignment, "pool has " + std::to_string(pool.size()) +
                                          " candidates but similarity is " +
                                          std::to_string(sim.size()) + " x " +
                                          std::to_string(sim.size()));
  }
  SelectionResult out;
  out.video_id = pool.meta().video_id;
  out.preset = preset;
  out.budget = budget;
  out.coverage_normalized = options.normalize_coverage;
  out.selection_order = greedy_order(r, sim, budget, preset, options, &out.gains);
  out.positions = out.selection_order;
  std::sort(out.positions.begin(), out.positions.end());
  for (std::size_t p : out.positions) {
    out.seconds.push_back(pool.second_of_position(p));
    out.frame_indices.push_back(pool.frame_index_of_position(p));
  }
  out.objective = objective_value(out.positions, r, sim, preset,
                                  ObjectiveOptions{options.normalize_coverage});
  return out;
}

}  // namespace framesel
