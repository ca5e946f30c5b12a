// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "framesel/cli.hpp"
#include "framesel/error.hpp"
#include "framesel/json_io.hpp"
#include "framesel/router.hpp"
#include "framesel/selector.hpp"
#include "framesel/verification_oracle.hpp"
#include "test_support.hpp"

namespace framesel::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

RelevanceScores uniform_scores(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RelevanceScores r;
  r.scores.resize(n);
  for (double& v : r.scores) v = u(rng);
  return r;
}

// 1. Greedy/optimal ratio >= 1 - 1/e on >= 1000 instances, N <= 12, K <= 4.
Outcome greedy_bound() {
  const auto start = std::chrono::steady_clock::now();
  InstanceGenerator gen({12, 4, 8, std::nullopt, kDefaultLambda}, 20240601);
  const auto reports = check_bound(gen, 1000);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double min_ratio = 1.0;
  std::array<std::size_t, 4> per_preset{};
  for (const auto& r : reports) {
    if (r.ratio < kGreedyBound - kBoundSlack || r.ratio > 1.0 + kBoundSlack) {
      return fail("instance " + std::to_string(r.index) + " ratio " + fmt(r.ratio, 17));
    }
    min_ratio = std::min(min_ratio, r.ratio);
    ++per_preset[static_cast<std::size_t>(r.preset.name)];
  }
  if (reports.size() < 1000) return fail("too few instances");
  for (std::size_t c : per_preset) {
    if (c == 0) return fail("a preset was never exercised");
  }
  if (secs >= 60.0) return fail("took " + fmt(secs) + " s (limit 60 s)");
  return {true, std::to_string(reports.size()) + " instances, min ratio " + fmt(min_ratio, 9) +
                    " >= " + fmt(kGreedyBound - kBoundSlack, 9) + ", " + fmt(secs, 3) + " s"};
}

// 2. Diminishing returns and monotonicity on 500 (A subset B, e) triples per preset.
Outcome submodularity_monotonicity() {
  const PropertyReport rep = property_suite(7, 500);
  const std::size_t per_preset = rep.submodularity.passed / kPresetOrder.size();
  if (rep.submodularity.failed || rep.monotonicity.failed) {
    return fail(rep.first_counterexample.value_or("failure"));
  }
  if (rep.submodularity.passed != 500 * kPresetOrder.size() ||
      rep.monotonicity.passed != 500 * kPresetOrder.size()) {
    return fail("unexpected check counts");
  }
  return {true, std::to_string(per_preset) + " triples per preset, 0 failures (tol 1e-6)"};
}

// 3. Incremental gains equal recomputed F(S + e) - F(S) at every greedy step.
Outcome marginal_consistency() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> pick_n(1, 50);
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = pick_n(rng);
    const auto r = uniform_scores(n, rng);
    const auto sim = similarity_matrix(random_unit_rows(n, 8, rng));
    const Preset preset = make_preset(kPresetOrder[t % 4], kDefaultLambda);
    const std::size_t k = std::min<std::size_t>(n, 1 + t % 16);
    const auto order = greedy_order(r, sim, k, preset, {});
    CoverageState state(n);
    std::vector<std::size_t> s;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const double fs = objective_value(s, r, sim, preset);
      double best = -1.0;
      std::size_t argmax = 0;
      for (std::size_t e = 1; e <= n; ++e) {
        if (state.contains(e)) continue;
        const double inc = marginal_gain(e, state, r, sim, preset);
        auto with = s;
        with.push_back(e);
        std::sort(with.begin(), with.end());
        const double rec = objective_value(with, r, sim, preset) - fs;
        worst = std::max(worst, std::abs(inc - rec));
        ++checks;
        if (std::abs(inc - rec) > 1e-5) {
          return fail("instance " + std::to_string(t) + " step " + std::to_string(step) +
                      " e=" + std::to_string(e) + ": " + fmt(inc, 12) + " vs " + fmt(rec, 12));
        }
        if (argmax == 0 || inc > best) {
          best = inc;
          argmax = e;
        }
      }
      if (argmax != order[step]) return fail("greedy pick differs from incremental argmax");
      state.add(order[step], sim);
      s.push_back(order[step]);
      std::sort(s.begin(), s.end());
    }
  }
  return {true, std::to_string(checks) + " candidate checks on 100 instances, max |diff| " +
                    fmt(worst, 3) + " <= 1e-5"};
}

// 4. C(empty) == 0 exactly.
Outcome empty_set_zero() {
  std::mt19937_64 rng(404);
  std::size_t count = 0;
  for (std::size_t n : {1u, 2u, 7u, 50u, 333u, 1000u}) {
    for (std::size_t dim : {1u, 3u, 64u}) {
      const auto sim = similarity_matrix(random_unit_rows(n, dim, rng));
      const auto r = uniform_scores(n, rng);
      const std::vector<std::size_t> none;
      if (coverage_value(none, sim) != 0.0) return fail("coverage_value(empty) != 0");
      if (CoverageState(n).coverage_value() != 0.0) return fail("CoverageState(empty) != 0");
      for (PresetName p : kPresetOrder) {
        if (objective_value(none, r, sim, make_preset(p)) != 0.0) return fail("F(empty) != 0");
      }
      ++count;
    }
  }
  return {true, "exact zero on " + std::to_string(count) + " instances up to N=1000"};
}

// 5. (1, 0) selection == top-K by r with smallest-index ties.
Outcome relevance_only_equivalence() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> pick_n(1, 80);
  std::uniform_int_distribution<int> level(0, 9);
  std::size_t tied_instances = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = pick_n(rng);
    RelevanceScores r;
    r.scores.resize(n);
    // Half the instances use 10 relevance levels to force ties.
    std::uniform_real_distribution<double> u(0, 1);
    for (double& v : r.scores) v = t % 2 ? level(rng) / 9.0 : u(rng);
    std::vector<double> sorted = r.scores;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++tied_instances;
    const auto sim = similarity_matrix(random_unit_rows(n, 5, rng));
    const std::size_t k = 1 + t % 20;

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 1);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return r.scores[a - 1] > r.scores[b - 1]; });
    idx.resize(std::min(k, n));
    std::sort(idx.begin(), idx.end());

    const auto res = select(r, sim, k, make_preset(PresetName::RelevanceOnly),
                            build_pool({"v", 1.0, n}));
    if (res.positions != idx) return fail("instance " + std::to_string(t) + " differs from top-K");
  }
  return {true, "100 instances (" + std::to_string(tied_instances) + " with ties) match top-K"};
}

// 6. Duplicates of a selected frame have ~zero gain and wait until positive gains are gone.
Outcome duplicate_suppression() {
  const auto rows = testing::duplicate_cluster_rows();
  const auto sim = similarity_matrix(testing::unit_rows(rows));
  const RelevanceScores r{std::vector<double>(rows.size(), 0.5), RelevanceMode::RawRelu};
  const Preset preset = make_preset(PresetName::CoverageOnly);
  const std::size_t n = rows.size();

  std::vector<double> gains;
  const auto order = greedy_order(r, sim, n, preset, {}, &gains);
  CoverageState state(n);
  for (std::size_t step = 0; step < order.size(); ++step) {
    bool positive_left = false;
    for (std::size_t e = 1; e <= n; ++e) {
      if (!state.contains(e) && marginal_gain(e, state, r, sim, preset) > 1e-6) positive_left = true;
    }
    const double chosen_gain = marginal_gain(order[step], state, r, sim, preset);
    if (positive_left && chosen_gain <= 1e-6) {
      return fail("zero-gain duplicate chosen at step " + std::to_string(step));
    }
    state.add(order[step], sim);
    if (step == 0) {
      for (std::size_t dup = 2; dup <= 5; ++dup) {
        const double g = marginal_gain(dup, state, r, sim, preset);
        if (g > 1e-6) return fail("duplicate " + std::to_string(dup) + " gain " + fmt(g));
      }
    }
  }
  const std::vector<std::size_t> first_four(order.begin(), order.begin() + 4);
  if (first_four != std::vector<std::size_t>{1, 6, 7, 8}) return fail("unexpected pick order");
  return {true, "duplicates 2-5 gain <= 1e-6 after picking 1; order 1,6,7,8 then duplicates"};
}

// 7. Pool alignment invariants on 1000 random (fps, total_frames, cap).
Outcome alignment_invariants() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> fps(0.25, 240.0);
  std::uniform_real_distribution<double> log_frames(0.0, std::log(5e6));
  std::uniform_int_distribution<std::size_t> cap(1, 2000);
  std::size_t downsampled = 0, identity = 0, rejected = 0;
  while (downsampled + identity < 1000) {
    const VideoMeta meta{"v", fps(rng), static_cast<std::uint64_t>(std::exp(log_frames(rng)))};
    const std::size_t c = cap(rng);
    const std::uint64_t d = meta.duration_seconds();
    try {
      const CandidatePool pool = build_pool(meta, c);
      const auto& s = pool.seconds();
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] <= s[i - 1]) return fail("not strictly increasing");
      }
      if (s.back() > d - 1) return fail("second beyond D - 1");
      if (d <= c) {
        ++identity;
        if (s.size() != d || s.front() != 0 || s.back() != d - 1) return fail("identity pool broken");
      } else {
        ++downsampled;
        if (s.size() != c || s.front() != 0 || s.back() != d - 1) return fail("endpoints not pinned");
      }
      for (std::size_t i = 1; i <= pool.size(); ++i) {
        if (pool.frame_index_of_position(i) > meta.total_frames - 1) return fail("frame unclamped");
      }
      // Seconds past the end still clamp.
      if (frame_index_of_second(meta, d + 5) > meta.total_frames - 1) return fail("clamp");
    } catch (const Error& e) {
      const bool expected = (d == 0 && e.kind() == ErrorKind::EmptyPool) ||
                            (c == 1 && d > 1 && e.kind() == ErrorKind::DegenerateSpacing);
      if (!expected) return fail(std::string("unexpected error: ") + e.what());
      ++rejected;
    }
  }
  if (downsampled == 0 || identity == 0) return fail("sampling missed a branch");
  return {true, std::to_string(downsampled) + " downsampled, " + std::to_string(identity) +
                    " identity pools; " + std::to_string(rejected) + " degenerate draws correctly rejected"};
}

// 8. Routing table attains row maxima with the preset-order tie rule; routing is a deterministic
//    composition; oracle routing returns the table entry.
Outcome routing_correctness() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> grid(0, 4);
  const auto& types = default_question_types();
  for (int t = 0; t < 200; ++t) {
    AccuracyTable acc;
    for (const auto& type : types) {
      for (PresetName p : kPresetOrder) acc[type][p] = 0.5 + 0.1 * grid(rng);
    }
    const RoutingTable table = fit_routing(acc);
    if (table.provenance != acc) return fail("provenance not stored verbatim");
    for (const auto& type : types) {
      double best = -1;
      PresetName first_best = kPresetOrder[0];
      for (PresetName p : kPresetOrder) {
        if (acc[type][p] > best) {
          best = acc[type][p];
          first_best = p;
        }
      }
      if (table.mapping.at(type) != first_best) return fail("mapping misses row max / tie rule");
      if (route_type(table, type, 0.5) != make_preset(first_best, 0.5)) return fail("oracle routing");
    }
  }
  const auto model = train_classifier(testing::synthetic_questions(30, 88)).model;
  AccuracyTable acc;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (PresetName p : kPresetOrder) acc[types[i]][p] = p == kPresetOrder[i % 4] ? 0.9 : 0.4;
  }
  const RoutingTable table = fit_routing(acc);
  for (const auto& q : testing::synthetic_questions(10, 89)) {
    const Preset a = route(model, table, q.text, 0.3);
    const Preset b = route(model, table, q.text, 0.3);
    const Preset expected = route_type(table, predict_type(model, q.text).type, 0.3);
    if (!(a == b) || !(a == expected)) return fail("route is not the deterministic composition");
  }
  return {true, "200 random tables with ties, row max + tie rule + oracle bypass; 70 routed questions"};
}

// 9. 7-class keyword corpus, 80/20 split, 10 epochs: >= 99% held-out, loss non-increasing.
Outcome classifier_protocol() {
  const auto data = testing::synthetic_questions(100, 909);
  std::vector<LabeledQuestion> train, test;
  // Questions come in rounds of one per type; every fifth round is held out.
  for (std::size_t i = 0; i < data.size(); ++i) {
    ((i / default_question_types().size()) % 5 == 4 ? test : train).push_back(data[i]);
  }
  TrainOptions opts;
  opts.epochs = 10;
  const TrainResult tr = train_classifier(train, default_question_types(), opts);
  double prev = tr.initial_loss;
  for (double l : tr.epoch_losses) {
    if (l > prev + 1e-6) return fail("loss rose from " + fmt(prev) + " to " + fmt(l));
    prev = l;
  }
  const Evaluation ev = evaluate(tr.model, test);
  if (ev.accuracy() < 0.99) {
    return fail("held-out accuracy " + fmt(ev.accuracy()) + " < 0.99");
  }
  return {true, "held-out " + std::to_string(ev.correct) + "/" + std::to_string(ev.total) + " = " +
                    fmt(ev.accuracy(), 4) + ", loss " + fmt(tr.initial_loss, 4) + " -> " +
                    fmt(tr.epoch_losses.back(), 4) + " non-increasing"};
}

// 10. compare: greedy F >= uniform F - 1e-9 on 100 instances; identical rows at K = N.
Outcome baseline_dominance() {
  testing::TempDir dir;
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<std::size_t> pick_n(2, 120);
  double min_margin = 1e300;
  auto compare = [&](const std::string& manifest, const std::string& preset, std::size_t k) {
    const std::string ks = std::to_string(k);
    const char* argv[] = {"framesel", "compare", "--manifest", manifest.c_str(),
                          "--preset", preset.c_str(), "--k", ks.c_str()};
    std::ostringstream out, err;
    if (cli::run(8, argv, out, err) != 0) throw Error(ErrorKind::Verification, err.str());
    return parse_json(out.str(), "compare");
  };
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = pick_n(rng);
    const auto manifest =
        testing::write_random_fixture(dir.path(), "c" + std::to_string(t), n, 16, 16, rng()).string();
    const std::string preset(to_string(kPresetOrder[t % 4]));
    const std::size_t k = 1 + rng() % n;
    const Json j = compare(manifest, preset, k);
    const double g = j["greedy"]["objective"].get<double>();
    const double u = j["uniform"]["objective"].get<double>();
    if (g < u - 1e-9) {
      return fail("instance " + std::to_string(t) + " (" + preset + ", N=" + std::to_string(n) +
                  ", K=" + std::to_string(k) + "): greedy F " + fmt(g, 12) + " < uniform F " +
                  fmt(u, 12));
    }
    min_margin = std::min(min_margin, g - u);
    if (t % 10 == 0) {
      const Json all = compare(manifest, preset, n);
      if (all["greedy"] != all["uniform"]) return fail("rows differ at K = N");
    }
  }
  return {true, "100 instances, min greedy-uniform F margin " + fmt(min_margin, 4) +
                    "; K = N rows identical"};
}

// 11. N = 1000, K = 32 under 2 s; doubling N gives ~4x (2.5x - 6x).
Outcome performance_envelope() {
  auto time_select = [](std::size_t n) {
    std::mt19937_64 rng(1111 + n);
    const auto r = uniform_scores(n, rng);
    const auto sim = similarity_matrix(random_unit_rows(n, 64, rng));
    const Preset p = make_preset(PresetName::CoverageOriented);
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const auto order = greedy_order(r, sim, 32, p, {});
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (order.size() != 32) throw Error(ErrorKind::Verification, "short selection");
      best = std::min(best, secs);
    }
    return best;
  };
  const double t1000 = time_select(1000);
  const double t2000 = time_select(2000);
  const double ratio = t2000 / t1000;
  const std::string detail = "N=1000 " + fmt(t1000 * 1e3, 4) + " ms, N=2000 " +
                             fmt(t2000 * 1e3, 4) + " ms, ratio " + fmt(ratio, 3);
  if (t1000 >= 2.0) return fail(detail + " (N=1000 over 2 s)");
  if (ratio < 2.5 || ratio > 6.0) return fail(detail + " (outside 2.5x-6x)");
  return {true, detail};
}

// 12. Binary and JSON artifacts round-trip byte-identically; corruptions give format errors.
Outcome format_round_trips() {
  testing::TempDir dir;
  std::mt19937_64 rng(1212);
  std::uniform_int_distribution<std::uint32_t> bits;
  // Embedding binary, arbitrary bit patterns.
  for (int t = 0; t < 20; ++t) {
    FloatMatrix m;
    m.rows = 1 + t;
    m.dim = 1 + (t * 7) % 33;
    for (std::size_t k = 0; k < std::size_t{m.rows} * m.dim; ++k) {
      m.values.push_back(std::bit_cast<float>(bits(rng)));
    }
    write_matrix(dir / "a.bin", m);
    write_matrix(dir / "b.bin", read_matrix(dir / "a.bin"));
    if (read_text_file(dir / "a.bin") != read_text_file(dir / "b.bin")) return fail("binary drift");
  }
  auto json_stable = [&](const std::string& text, auto from, auto to) {
    write_file_atomic(dir / "x.json", text);
    const auto back = from(parse_json(read_text_file(dir / "x.json"), "x"));
    write_file_atomic(dir / "y.json", to_text(to(back)));
    return read_text_file(dir / "y.json") == text;
  };
  const auto manifest = testing::write_random_fixture(dir.path(), "rt", 64, 12, 10, 5);
  const VideoInputs in = load_embeddings(manifest);
  const auto sel = select(relevance_scores(in.embeddings), similarity_matrix(in.embeddings), 9,
                          make_preset(PresetName::RelevanceOriented, 0.3), in.pool);
  const auto model = train_classifier(testing::synthetic_questions(8, 3)).model;
  AccuracyTable acc;
  for (const auto& type : default_question_types()) {
    for (PresetName p : kPresetOrder) acc[type][p] = std::uniform_real_distribution<double>(0, 1)(rng);
  }
  const RoutingTable table = fit_routing(acc);
  const bool ok =
      json_stable(to_text(pool_to_json(build_pool({"p", 29.97, 123456}))), pool_from_json, pool_to_json) &&
      json_stable(read_text_file(manifest), video_manifest_from_json, video_manifest_to_json) &&
      json_stable(to_text(selection_to_json(sel)), selection_from_json, selection_to_json) &&
      json_stable(to_text(model_to_json(model)), model_from_json, model_to_json) &&
      json_stable(to_text(routing_to_json(table)), routing_from_json, routing_to_json);
  if (!ok) return fail("JSON artifact not byte-stable");

  // Corruptions.
  const auto good = encode_matrix(testing::matrix_from_rows({{1, 2}, {3, 4}}));
  auto expect_format = [&](std::vector<std::uint8_t> bytes) {
    try {
      decode_matrix(bytes);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Format;
    }
    return false;
  };
  auto magic = good, version = good, rows = good;
  magic[0] = 'X';
  version[4] = 9;
  rows[8] = 5;
  if (!expect_format(magic) || !expect_format(version) || !expect_format(rows)) {
    return fail("corruption not reported as a format error");
  }
  // A well-formed file whose row count disagrees with the pool is an alignment error.
  write_matrix(dir / "rt.sem.bin", testing::matrix_from_rows(std::vector<std::vector<double>>(63, {1, 0})));
  try {
    load_embeddings(manifest);
    return fail("row-count mismatch accepted");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Alignment) return fail("row-count mismatch: wrong error kind");
  }
  return {true, "binary + 5 JSON artifact kinds byte-stable; magic/version/row-count rejected"};
}

}  // namespace
}  // namespace framesel::acceptance

int main() {
  using namespace framesel::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"greedy (1-1/e) bound", greedy_bound},
      {"submodularity & monotonicity", submodularity_monotonicity},
      {"marginal-gain consistency", marginal_consistency},
      {"empty-set normalization", empty_set_zero},
      {"relevance-only equivalence", relevance_only_equivalence},
      {"duplicate suppression", duplicate_suppression},
      {"alignment invariants", alignment_invariants},
      {"routing correctness", routing_correctness},
      {"classifier protocol", classifier_protocol},
      {"baseline dominance", baseline_dominance},
      {"performance envelope", performance_envelope},
      {"format round-trips", format_round_trips},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
