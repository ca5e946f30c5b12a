#include "framesel/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "framesel/candidate_pool.hpp"
#include "framesel/error.hpp"
#include "framesel/router.hpp"
#include "framesel/verification_oracle.hpp"

namespace framesel::cli {

std::vector<std::size_t> uniform_positions(std::size_t n, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::Budget, "budget K must be at least 1");
  std::vector<std::size_t> out;
  if (k >= n) {
    for (std::size_t p = 1; p <= n; ++p) out.push_back(p);
    return out;
  }
  if (k == 1) return {1};
  for (std::uint64_t idx : even_spacing(n, k)) out.push_back(static_cast<std::size_t>(idx) + 1);
  return out;
}

namespace {

MethodMetrics metrics_for(std::vector<std::size_t> positions, const RelevanceScores& r,
                          const SimilarityMatrix& sim, const Preset& preset, bool normalize) {
  MethodMetrics m;
  m.positions = std::move(positions);
  m.objective = objective_value(m.positions, r, sim, preset, ObjectiveOptions{normalize});
  m.coverage = coverage_value(m.positions, sim);
  m.relevance = relevance_value(m.positions, r);
  return m;
}

Json metrics_to_json(const MethodMetrics& m) {
  Json j;
  j["positions"] = m.positions;
  j["objective"] = m.objective;
  j["coverage"] = m.coverage;
  j["relevance"] = m.relevance;
  return j;
}

}  // namespace

Comparison compare_selection(const RelevanceScores& r, const SimilarityMatrix& sim,
                             std::size_t budget, const Preset& preset, SelectOptions options) {
  auto greedy = greedy_order(r, sim, budget, preset, options);
  std::sort(greedy.begin(), greedy.end());
  Comparison c;
  c.greedy = metrics_for(std::move(greedy), r, sim, preset, options.normalize_coverage);
  c.uniform = metrics_for(uniform_positions(sim.size(), budget), r, sim, preset,
                          options.normalize_coverage);
  return c;
}

Json comparison_to_json(const Comparison& c, const std::string& video_id, const Preset& preset,
                        std::size_t budget, bool coverage_normalized) {
  Json j;
  j["video_id"] = video_id;
  j["preset"] = preset_to_json(preset);
  j["budget"] = budget;
  j["coverage_normalized"] = coverage_normalized;
  j["greedy"] = metrics_to_json(c.greedy);
  j["uniform"] = metrics_to_json(c.uniform);
  Json delta;
  delta["objective"] = c.greedy.objective - c.uniform.objective;
  delta["coverage"] = c.greedy.coverage - c.uniform.coverage;
  delta["relevance"] = c.greedy.relevance - c.uniform.relevance;
  j["delta"] = std::move(delta);
  return j;
}

namespace {

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
  bool quiet = false;
};

struct SelectConfig {
  std::string manifest;
  std::string batch;
  std::size_t budget = kDefaultBudget;
  std::string preset = "relevance_oriented";
  double lambda = kDefaultLambda;
  std::string relevance_mode = "raw_relu";
  bool normalize_coverage = false;
  bool lazy = false;
  std::string model;
  std::string routing;
  std::string question;
  std::string question_type;
};

void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
  } else {
    write_file_atomic(g.out, text);
  }
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::Parameter, "--lambda must lie in (0, 1)");
  }
}

Preset resolve_preset(const SelectConfig& c) {
  if (c.preset != "auto") return make_preset(parse_preset_name(c.preset), c.lambda);
  if (c.routing.empty()) {
    throw Error(ErrorKind::Parameter, "--preset auto needs --routing");
  }
  const RoutingTable table = routing_from_json(parse_json(read_text_file(c.routing), c.routing));
  if (!c.question_type.empty()) return route_type(table, c.question_type, c.lambda);
  if (c.model.empty() || c.question.empty()) {
    throw Error(ErrorKind::Parameter,
                "--preset auto needs --model and --question (or --question-type)");
  }
  const QuestionTypeModel model = model_from_json(parse_json(read_text_file(c.model), c.model));
  return route(model, table, c.question, c.lambda);
}

void validate_select(const SelectConfig& c) {
  if (c.budget < 1) throw Error(ErrorKind::Budget, "--k must be at least 1");
  require_lambda(c.lambda);
  if (c.manifest.empty() && c.batch.empty()) {
    throw Error(ErrorKind::Parameter, "--manifest (or --batch) is required");
  }
}

struct Prepared {
  VideoInputs inputs;
  RelevanceScores relevance;
  SimilarityMatrix similarity;
};

Prepared prepare(const std::string& manifest, const SelectConfig& c) {
  VideoInputs inputs = load_embeddings(manifest);
  RelevanceScores r = relevance_scores(inputs.embeddings, parse_relevance_mode(c.relevance_mode));
  SimilarityMatrix sim = similarity_matrix(inputs.embeddings);
  return Prepared{std::move(inputs), std::move(r), std::move(sim)};
}

std::string select_one(const std::string& manifest, const SelectConfig& c, const Preset& preset) {
  const Prepared p = prepare(manifest, c);
  const SelectionResult result =
      select(p.relevance, p.similarity, c.budget, preset, p.inputs.pool,
             SelectOptions{c.normalize_coverage, c.lazy});
  return to_text(selection_to_json(result));
}

std::vector<std::string> read_batch_list(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  const auto base = std::filesystem::path(path).parent_path();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::filesystem::path p(line);
    out.push_back((p.is_absolute() ? p : base / p).string());
  }
  return out;
}

int cmd_select(const Globals& g, const SelectConfig& c, std::ostream& out) {
  validate_select(c);
  const Preset preset = resolve_preset(c);
  if (c.batch.empty()) {
    emit(g, out, select_one(c.manifest, c, preset));
    return 0;
  }
  if (g.out.empty()) throw Error(ErrorKind::Parameter, "--batch needs --out <directory>");
  std::filesystem::create_directories(g.out);
  for (const auto& manifest : read_batch_list(c.batch)) {
    const std::string text = select_one(manifest, c, preset);
    const auto id = selection_from_json(parse_json(text, manifest)).video_id;
    write_file_atomic(std::filesystem::path(g.out) / (id + ".selection.json"), text);
  }
  return 0;
}

int cmd_compare(const Globals& g, const SelectConfig& c, std::ostream& out) {
  validate_select(c);
  if (!c.batch.empty()) throw Error(ErrorKind::Parameter, "compare takes a single --manifest");
  const Preset preset = resolve_preset(c);
  const Prepared p = prepare(c.manifest, c);
  const Comparison cmp = compare_selection(p.relevance, p.similarity, c.budget, preset,
                                           SelectOptions{c.normalize_coverage, c.lazy});
  emit(g, out,
       to_text(comparison_to_json(cmp, p.inputs.pool.meta().video_id, preset, c.budget,
                                  c.normalize_coverage)));
  return 0;
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-adaptive keyframe selection by relevance plus facility-location coverage",
               "framesel"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_flag("--quiet", g.quiet, "Suppress progress output on stderr");

  // pool
  VideoMeta meta;
  meta.video_id = "video";
  std::size_t cap = kDefaultPoolCap;
  auto* pool_cmd = app.add_subcommand("pool", "Build the candidate pool manifest for a video");
  pool_cmd->add_option("--fps", meta.fps, "Average frames per second")->required();
  pool_cmd->add_option("--frames", meta.total_frames, "Decoded frame count")->required();
  pool_cmd->add_option("--cap", cap, "Maximum number of candidates")->capture_default_str();
  pool_cmd->add_option("--video-id", meta.video_id, "Video identifier")->capture_default_str();

  // select / compare
  SelectConfig sc;
  auto add_select_options = [&sc](CLI::App* cmd) {
    cmd->add_option("--manifest", sc.manifest, "Video manifest with embedding paths");
    cmd->add_option("--k", sc.budget, "Frame budget K")->capture_default_str();
    cmd->add_option("--preset", sc.preset,
                    "relevance_only | relevance_oriented | coverage_oriented | coverage_only | auto")
        ->capture_default_str();
    cmd->add_option("--lambda", sc.lambda, "Trade-off for the oriented presets, in (0, 1)")
        ->capture_default_str();
    cmd->add_option("--relevance-mode", sc.relevance_mode, "raw_relu | zscore_relu_maxnorm")
        ->capture_default_str();
    cmd->add_flag("--normalize-coverage", sc.normalize_coverage, "Divide coverage by N");
    cmd->add_flag("--lazy", sc.lazy, "Use the lazy-greedy engine");
    cmd->add_option("--model", sc.model, "Question-type model (for --preset auto)");
    cmd->add_option("--routing", sc.routing, "Routing table (for --preset auto)");
    cmd->add_option("--question", sc.question, "Question text (for --preset auto)");
    cmd->add_option("--question-type", sc.question_type,
                    "Ground-truth question type; bypasses the classifier");
  };
  auto* select_cmd = app.add_subcommand("select", "Select K frames for one video");
  add_select_options(select_cmd);
  select_cmd->add_option("--batch", sc.batch, "File listing one manifest per line");
  auto* compare_cmd =
      app.add_subcommand("compare", "Compare greedy selection with uniform sampling");
  add_select_options(compare_cmd);

  // oracle
  std::size_t oracle_n = 12, oracle_k = 4, oracle_trials = 1000, oracle_dim = 8;
  std::string oracle_preset;
  double oracle_lambda = kDefaultLambda;
  auto* oracle_cmd = app.add_subcommand("oracle", "Check greedy against exhaustive search");
  oracle_cmd->add_option("--n", oracle_n, "Maximum ground-set size (<= 20)")->capture_default_str();
  oracle_cmd->add_option("--k", oracle_k, "Maximum budget")->capture_default_str();
  oracle_cmd->add_option("--trials", oracle_trials, "Number of instances")->capture_default_str();
  oracle_cmd->add_option("--dim", oracle_dim, "Semantic dimension")->capture_default_str();
  oracle_cmd->add_option("--preset", oracle_preset, "Fix the preset (default: rotate all four)");
  oracle_cmd->add_option("--lambda", oracle_lambda, "Oriented-preset lambda")->capture_default_str();

  // props
  std::size_t props_trials = 500, props_n = 12, props_dim = 8;
  auto* props_cmd = app.add_subcommand("props", "Randomized monotonicity/submodularity checks");
  props_cmd->add_option("--trials", props_trials, "Number of instances")->capture_default_str();
  props_cmd->add_option("--n", props_n, "Maximum ground-set size")->capture_default_str();
  props_cmd->add_option("--dim", props_dim, "Semantic dimension")->capture_default_str();

  // train-classifier
  std::string train_data, train_types, train_eval, train_report;
  TrainOptions topts;
  auto* train_cmd = app.add_subcommand("train-classifier", "Train the question-type classifier");
  train_cmd->add_option("--data", train_data, "type<TAB>question training file")->required();
  train_cmd->add_option("--epochs", topts.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--lr", topts.learning_rate, "Initial learning rate")
      ->capture_default_str();
  train_cmd->add_flag("--shuffle", topts.shuffle, "Shuffle example order using --seed");
  train_cmd->add_option("--types", train_types, "Comma-separated type list (default: 7 types)");
  train_cmd->add_option("--eval", train_eval, "Labeled evaluation file");
  train_cmd->add_option("--report", train_report, "Write losses/evaluation JSON here");

  // fit-routing
  std::string accuracy_csv;
  auto* fit_cmd = app.add_subcommand("fit-routing", "Fit the type-to-preset routing table");
  fit_cmd->add_option("--accuracy", accuracy_csv, "Validation accuracy CSV")->required();

  // route
  std::string route_model, route_table, route_question, route_type_name;
  double route_lambda = kDefaultLambda;
  auto* route_cmd = app.add_subcommand("route", "Resolve the preset for a question");
  route_cmd->add_option("--model", route_model, "Question-type model");
  route_cmd->add_option("--routing", route_table, "Routing table")->required();
  route_cmd->add_option("--question", route_question, "Question text");
  route_cmd->add_option("--question-type", route_type_name, "Ground-truth type (oracle routing)");
  route_cmd->add_option("--lambda", route_lambda, "Oriented-preset lambda")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error:" << exit_code(ErrorKind::Parameter) << ":parameter: " << single_line(e.what())
        << "\n";
    return exit_code(ErrorKind::Parameter);
  }

  try {
    if (pool_cmd->parsed()) {
      emit(g, out, to_text(pool_to_json(build_pool(meta, cap))));
      return 0;
    }
    if (select_cmd->parsed()) return cmd_select(g, sc, out);
    if (compare_cmd->parsed()) return cmd_compare(g, sc, out);
    if (oracle_cmd->parsed()) {
      if (oracle_n > kMaxEnumerationSize) {
        throw Error(ErrorKind::InstanceTooLarge,
                    "--n " + std::to_string(oracle_n) + " exceeds the enumeration limit of 20");
      }
      require_lambda(oracle_lambda);
      InstanceSpec spec{oracle_n, oracle_k, oracle_dim, std::nullopt, oracle_lambda};
      if (!oracle_preset.empty()) spec.preset = parse_preset_name(oracle_preset);
      InstanceGenerator gen(spec, g.seed);
      const auto reports = check_bound(gen, oracle_trials);
      std::string text;
      double min_ratio = 1.0;
      for (const auto& r : reports) {
        text += to_text(oracle_report_to_json(r));
        min_ratio = std::min(min_ratio, r.ratio);
      }
      emit(g, out, text);
      if (!g.quiet) {
        err << "oracle: " << reports.size() << " instances, minimum greedy/optimal ratio "
            << min_ratio << " (bound " << kGreedyBound << ")\n";
      }
      return 0;
    }
    if (props_cmd->parsed()) {
      const PropertyReport rep = property_suite(g.seed, props_trials, props_n, props_dim);
      emit(g, out, to_text(property_report_to_json(rep)));
      if (!rep.ok()) {
        throw Error(ErrorKind::Verification,
                    "property violation: " + rep.first_counterexample.value_or("unknown"));
      }
      if (!g.quiet) err << "props: " << rep.trials << "/" << props_trials << " instances passed\n";
      return 0;
    }
    if (train_cmd->parsed()) {
      std::vector<std::string> types = default_question_types();
      if (!train_types.empty()) {
        types.clear();
        std::stringstream ss(train_types);
        std::string t;
        while (std::getline(ss, t, ',')) {
          if (!t.empty()) types.push_back(t);
        }
      }
      topts.seed = g.seed;
      const auto examples = parse_training_tsv(read_text_file(train_data));
      const TrainResult tr = train_classifier(examples, types, topts);
      emit(g, out, to_text(model_to_json(tr.model)));
      Json report;
      report["initial_loss"] = tr.initial_loss;
      report["epoch_losses"] = tr.epoch_losses;
      report["training_accuracy"] = evaluate(tr.model, examples).accuracy();
      if (!train_eval.empty()) {
        const Evaluation ev = evaluate(tr.model, parse_training_tsv(read_text_file(train_eval)));
        report["eval_accuracy"] = ev.accuracy();
        report["eval_correct"] = ev.correct;
        report["eval_total"] = ev.total;
        report["confusion"] = ev.confusion;
      }
      if (!train_report.empty()) write_file_atomic(train_report, to_text(report));
      if (!g.quiet) err << "train-classifier: " << report.dump() << "\n";
      return 0;
    }
    if (fit_cmd->parsed()) {
      emit(g, out, to_text(routing_to_json(fit_routing(parse_accuracy_csv(
                       read_text_file(accuracy_csv))))));
      return 0;
    }
    if (route_cmd->parsed()) {
      require_lambda(route_lambda);
      const RoutingTable table =
          routing_from_json(parse_json(read_text_file(route_table), route_table));
      Json j;
      Preset preset;
      if (!route_type_name.empty()) {
        preset = route_type(table, route_type_name, route_lambda);
        j["type"] = route_type_name;
        j["oracle"] = true;
      } else {
        if (route_model.empty() || route_question.empty()) {
          throw Error(ErrorKind::Parameter,
                      "route needs --model and --question, or --question-type");
        }
        const QuestionTypeModel model =
            model_from_json(parse_json(read_text_file(route_model), route_model));
        const Prediction pred = predict_type(model, route_question);
        preset = route_type(table, pred.type, route_lambda);
        j["type"] = pred.type;
        j["oracle"] = false;
        j["probabilities"] = pred.probabilities;
      }
      j["preset"] = preset_to_json(preset);
      emit(g, out, to_text(j));
      return 0;
    }
  } catch (const Error& e) {
    err << "error:" << exit_code(e.kind()) << ":" << kind_name(e.kind()) << ": "
        << single_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error:2:io: " << single_line(e.what()) << "\n";
    return 2;
  }
  return 0;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace framesel::cli
