#include "framesel/verification_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "framesel/error.hpp"

namespace framesel {

UnitRows random_unit_rows(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  UnitRows rows;
  rows.rows = n;
  rows.dim = dim;
  rows.values.resize(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double g = gauss(rng);
        rows.values[i * dim + k] = g;
        sq += g * g;
      }
    } while (sq < 1e-12);
  }
  return normalize_rows(rows, "random");
}

InstanceGenerator::InstanceGenerator(InstanceSpec spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {
  if (spec_.max_n < 1 || spec_.max_k < 1 || spec_.dim < 1) {
    throw Error(ErrorKind::Parameter, "instance spec needs max_n, max_k, dim >= 1");
  }
}

Instance InstanceGenerator::next() {
  std::uniform_int_distribution<std::size_t> pick_n(1, spec_.max_n);
  const std::size_t n = pick_n(rng_);
  std::uniform_int_distribution<std::size_t> pick_k(1, std::min(spec_.max_k, n));
  const std::size_t k = pick_k(rng_);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.relevance.scores.resize(n);
  for (double& v : inst.relevance.scores) v = unit(rng_);
  inst.similarity = similarity_matrix(random_unit_rows(n, spec_.dim, rng_));
  inst.budget = k;
  const PresetName name = spec_.preset ? *spec_.preset : kPresetOrder[count_ % kPresetOrder.size()];
  inst.preset = make_preset(name, spec_.lambda);
  ++count_;
  return inst;
}

Optimum brute_force_optimum(const RelevanceScores& r, const SimilarityMatrix& sim,
                            std::size_t budget, const Preset& preset) {
  const std::size_t n = sim.size();
  if (n > kMaxEnumerationSize) {
    throw Error(ErrorKind::InstanceTooLarge, "brute force limited to N <= 20, got N = " +
                                                 std::to_string(n));
  }
  if (r.size() != n) throw Error(ErrorKind::Alignment, "relevance and similarity sizes differ");
  const std::size_t kmax = std::min(budget, n);

  Optimum best;  // empty set, value 0
  std::vector<std::size_t> subset;
  // Depth-first in lexicographic order, so the first maximizer seen is the
  // lexicographically smallest one.
  auto visit = [&](auto&& self, std::size_t next) -> void {
    for (std::size_t p = next; p <= n; ++p) {
      subset.push_back(p);
      const double v = objective_value(subset, r, sim, preset);
      if (v > best.value) {
        best.value = v;
        best.positions = subset;
      }
      if (subset.size() < kmax) self(self, p + 1);
      subset.pop_back();
    }
  };
  visit(visit, 1);
  return best;
}

OracleReport oracle_report(const Instance& inst, std::size_t index) {
  OracleReport rep;
  rep.index = index;
  rep.n = inst.similarity.size();
  rep.k = inst.budget;
  rep.preset = inst.preset;
  const Optimum opt = brute_force_optimum(inst.relevance, inst.similarity, inst.budget, inst.preset);
  rep.optimal_value = opt.value;
  rep.optimal_set = opt.positions;
  rep.greedy_set = greedy_order(inst.relevance, inst.similarity, inst.budget, inst.preset, {});
  std::sort(rep.greedy_set.begin(), rep.greedy_set.end());
  rep.greedy_value = objective_value(rep.greedy_set, inst.relevance, inst.similarity, inst.preset);
  rep.ratio = rep.optimal_value == 0.0 ? 1.0 : rep.greedy_value / rep.optimal_value;
  return rep;
}

std::vector<OracleReport> check_bound(InstanceGenerator& generator, std::size_t trials) {
  std::vector<OracleReport> reports;
  reports.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    OracleReport rep = oracle_report(generator.next(), t);
    if (rep.ratio < kGreedyBound - kBoundSlack || rep.ratio > 1.0 + kBoundSlack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "instance " << t << " (n=" << rep.n << ", k=" << rep.k << ", preset "
          << to_string(rep.preset.name) << ") greedy/optimal ratio " << rep.ratio
          << " outside [1 - 1/e, 1]";
      throw Error(ErrorKind::Verification, msg.str());
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

namespace {

void record(CheckCount& count, bool ok, PropertyReport& report, const std::string& detail) {
  if (ok) {
    ++count.passed;
    return;
  }
  ++count.failed;
  if (!report.first_counterexample) report.first_counterexample = detail;
}

std::string describe_set(const std::vector<std::size_t>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::vector<std::size_t> with_element(std::vector<std::size_t> s, std::size_t x) {
  s.push_back(x);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

void check_instance_properties(const RelevanceScores& r, const SimilarityMatrix& sim,
                               std::mt19937_64& rng, PropertyReport& report) {
  const std::size_t n = sim.size();
  ++report.trials;

  const SimilarityIssues issues = check_similarity(sim);
  {
    std::ostringstream msg;
    msg << "similarity matrix invalid: asymmetry " << issues.max_asymmetry << ", diagonal error "
        << issues.max_diagonal_error << ", range excess " << issues.max_out_of_range;
    record(report.matrix_validity, issues.ok(), report, msg.str());
  }

  const double c_empty = coverage_value(std::vector<std::size_t>{}, sim);
  record(report.empty_set_zero, c_empty == 0.0, report,
         "C(empty) = " + std::to_string(c_empty));

  if (n < 1) return;

  // Random B, A subset of B, e outside B (when B is not everything).
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t e = perm.back();
  std::uniform_int_distribution<std::size_t> pick_b(0, n - 1);
  const std::size_t b_size = pick_b(rng);
  std::vector<std::size_t> b(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(b_size));
  std::vector<std::size_t> a;
  for (std::size_t p : b) {
    if (coin(rng)) a.push_back(p);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  for (PresetName name : kPresetOrder) {
    const Preset preset = make_preset(name, kDefaultLambda);
    const double fa = objective_value(a, r, sim, preset);
    const double fb = objective_value(b, r, sim, preset);
    const double gain_a = objective_value(with_element(a, e), r, sim, preset) - fa;
    const double gain_b = objective_value(with_element(b, e), r, sim, preset) - fb;
    const std::string where = std::string(to_string(name)) + " A=" + describe_set(a) +
                              " B=" + describe_set(b) + " e=" + std::to_string(e);
    record(report.monotonicity, fb >= fa - kPropertyTolerance, report,
           "monotonicity " + where + ": F(A)=" + std::to_string(fa) +
               " F(B)=" + std::to_string(fb));
    record(report.submodularity, gain_a >= gain_b - kPropertyTolerance, report,
           "submodularity " + where + ": gain(A)=" + std::to_string(gain_a) +
               " gain(B)=" + std::to_string(gain_b));
  }

  // Incremental coverage-vector gains against direct recomputation at B.
  CoverageState state(n);
  for (std::size_t p : b) state.add(p, sim);
  const Preset mixed = make_preset(PresetName::CoverageOriented, kDefaultLambda);
  const double fb = objective_value(b, r, sim, mixed);
  bool consistent = true;
  std::string detail;
  for (std::size_t p = 1; p <= n && consistent; ++p) {
    if (state.contains(p)) continue;
    const double incremental = marginal_gain(p, state, r, sim, mixed);
    const double recomputed = objective_value(with_element(b, p), r, sim, mixed) - fb;
    if (std::abs(incremental - recomputed) > kConsistencyTolerance) {
      consistent = false;
      detail = "marginal consistency S=" + describe_set(b) + " e=" + std::to_string(p) +
               ": incremental " + std::to_string(incremental) + " vs recomputed " +
               std::to_string(recomputed);
    }
  }
  record(report.marginal_consistency, consistent, report, detail);
}

PropertyReport property_suite(std::uint64_t seed, std::size_t trials, std::size_t max_n,
                              std::size_t dim) {
  PropertyReport report;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = pick_n(rng);
    RelevanceScores r;
    r.scores.resize(n);
    for (double& v : r.scores) v = unit(rng);
    const SimilarityMatrix sim = similarity_matrix(random_unit_rows(n, dim, rng));
    check_instance_properties(r, sim, rng, report);
  }
  return report;
}

}  // namespace framesel
