#include "framesel/router.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "framesel/error.hpp"

namespace framesel {
namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Sparse token counts of one question; the bias is implicit.
using SparseRow = std::vector<std::pair<std::size_t, double>>;

SparseRow featurize(const std::map<std::string, std::size_t>& vocab, std::string_view text) {
  std::map<std::size_t, double> counts;
  for (const auto& tok : tokenize(text)) {
    auto it = vocab.find(tok);
    if (it != vocab.end()) counts[it->second] += 1.0;
  }
  return {counts.begin(), counts.end()};
}

void class_scores(const std::vector<double>& w, std::size_t classes, std::size_t cols,
                  const SparseRow& x, std::vector<double>& out) {
  out.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    const double* row = w.data() + c * cols;
    double s = row[cols - 1];
    for (const auto& [k, v] : x) s += row[k] * v;
    out[c] = s;
  }
}

// Mean cross-entropy; log-sum-exp with the max subtracted.
double mean_loss(const std::vector<double>& w, std::size_t classes, std::size_t cols,
                 const std::vector<SparseRow>& xs, const std::vector<std::size_t>& ys) {
  std::vector<double> s;
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    class_scores(w, classes, cols, xs[i], s);
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - m);
    total += (m + std::log(z)) - s[ys[i]];
  }
  return total / static_cast<double>(xs.size());
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    const auto end = content.find('\n', start);
    const auto stop = end == std::string_view::npos ? content.size() : end;
    auto line = content.substr(start, stop - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

const std::vector<std::string>& default_question_types() {
  static const std::vector<std::string> types = {
      "plotQA", "needle", "ego", "count", "order", "anomaly_reco", "topic_reasoning"};
  return types;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

QuestionTypeModel::QuestionTypeModel(std::vector<std::string> types,
                                     std::map<std::string, std::size_t> vocabulary,
                                     std::vector<double> weights)
    : types_(std::move(types)), vocabulary_(std::move(vocabulary)), weights_(std::move(weights)) {
  if (types_.empty()) throw Error(ErrorKind::Format, "model declares no types");
  if (weights_.size() != types_.size() * columns()) {
    throw Error(ErrorKind::Format, "model weights have " + std::to_string(weights_.size()) +
                                       " entries, expected " +
                                       std::to_string(types_.size() * columns()));
  }
  std::vector<bool> seen(vocabulary_.size(), false);
  for (const auto& [tok, col] : vocabulary_) {
    if (col >= vocabulary_.size() || seen[col]) {
      throw Error(ErrorKind::Format, "vocabulary column indices must be a permutation");
    }
    seen[col] = true;
  }
}

std::vector<double> QuestionTypeModel::scores(std::string_view text) const {
  std::vector<double> out;
  class_scores(weights_, types_.size(), columns(), featurize(vocabulary_, text), out);
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

TrainResult train_classifier(const std::vector<LabeledQuestion>& examples,
                             const std::vector<std::string>& types, TrainOptions options) {
  if (options.epochs < 1) throw Error(ErrorKind::Parameter, "epochs must be at least 1");
  if (!(options.learning_rate > 0.0)) {
    throw Error(ErrorKind::Parameter, "learning rate must be positive");
  }
  if (types.empty()) throw Error(ErrorKind::Parameter, "no question types declared");
  std::map<std::string, std::size_t> type_index;
  for (std::size_t c = 0; c < types.size(); ++c) {
    if (!type_index.emplace(types[c], c).second) {
      throw Error(ErrorKind::Parameter, "duplicate question type '" + types[c] + "'");
    }
  }

  std::vector<std::size_t> per_class(types.size(), 0);
  std::set<std::string> tokens;
  for (const auto& ex : examples) {
    auto it = type_index.find(ex.type);
    if (it == type_index.end()) {
      throw Error(ErrorKind::Parameter, "example labeled with undeclared type '" + ex.type + "'");
    }
    ++per_class[it->second];
    for (auto& t : tokenize(ex.text)) tokens.insert(std::move(t));
  }
  for (std::size_t c = 0; c < types.size(); ++c) {
    if (per_class[c] == 0) {
      throw Error(ErrorKind::MissingClass, "no training examples for type '" + types[c] + "'");
    }
  }
  if (tokens.empty()) throw Error(ErrorKind::DegenerateData, "training text has no tokens");

  std::map<std::string, std::size_t> vocab;
  for (const auto& t : tokens) vocab.emplace(t, vocab.size());

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<SparseRow> xs;
  std::vector<std::size_t> ys;
  for (std::size_t i : order) {
    xs.push_back(featurize(vocab, examples[i].text));
    ys.push_back(type_index.at(examples[i].type));
  }

  const std::size_t classes = types.size();
  const std::size_t cols = vocab.size() + 1;
  const double m = static_cast<double>(xs.size());
  std::vector<double> w(classes * cols, 0.0);
  std::vector<double> grad(w.size());
  std::vector<double> trial(w.size());
  std::vector<double> s;

  TrainResult result;
  double lr = options.learning_rate;
  double loss = mean_loss(w, classes, cols, xs, ys);
  result.initial_loss = loss;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      class_scores(w, classes, cols, xs[i], s);
      const auto p = softmax(s);
      for (std::size_t c = 0; c < classes; ++c) {
        const double d = (p[c] - (c == ys[i] ? 1.0 : 0.0)) / m;
        double* g = grad.data() + c * cols;
        for (const auto& [k, v] : xs[i]) g[k] += d * v;
        g[cols - 1] += d;
      }
    }
    // Halve until the step does not raise the loss; give up (no step) after
    // the rate underflows to irrelevance.
    for (int attempt = 0; attempt < 60; ++attempt) {
      for (std::size_t k = 0; k < w.size(); ++k) trial[k] = w[k] - lr * grad[k];
      const double next = mean_loss(trial, classes, cols, xs, ys);
      if (next <= loss) {
        w.swap(trial);
        loss = next;
        break;
      }
      lr *= 0.5;
    }
    result.epoch_losses.push_back(loss);
  }
  result.final_learning_rate = lr;
  result.model = QuestionTypeModel(types, std::move(vocab), std::move(w));
  return result;
}

Prediction predict_type(const QuestionTypeModel& model, std::string_view text) {
  Prediction pred;
  const auto s = model.scores(text);
  pred.probabilities = softmax(s);
  pred.index = static_cast<std::size_t>(
      std::max_element(pred.probabilities.begin(), pred.probabilities.end()) -
      pred.probabilities.begin());
  pred.type = model.types()[pred.index];
  return pred;
}

Evaluation evaluate(const QuestionTypeModel& model, const std::vector<LabeledQuestion>& examples) {
  const auto& types = model.types();
  Evaluation ev;
  ev.confusion.assign(types.size(), std::vector<std::size_t>(types.size(), 0));
  for (const auto& ex : examples) {
    const auto it = std::find(types.begin(), types.end(), ex.type);
    if (it == types.end()) {
      throw Error(ErrorKind::Parameter, "evaluation example has unknown type '" + ex.type + "'");
    }
    const auto truth = static_cast<std::size_t>(it - types.begin());
    const auto pred = predict_type(model, ex.text);
    ++ev.confusion[truth][pred.index];
    ++ev.total;
    if (pred.index == truth) ++ev.correct;
  }
  return ev;
}

RoutingTable fit_routing(const AccuracyTable& table) {
  RoutingTable out;
  for (const auto& [type, row] : table) {
    PresetName best = kPresetOrder.front();
    double best_acc = -1.0;
    for (PresetName p : kPresetOrder) {
      const auto it = row.find(p);
      if (it == row.end()) {
        throw Error(ErrorKind::IncompleteTable, "accuracy table lacks " +
                                                    std::string(to_string(p)) + " for type '" +
                                                    type + "'");
      }
      const double acc = it->second;
      if (!(acc >= 0.0 && acc <= 1.0)) {
        throw Error(ErrorKind::Parameter,
                    "accuracy for type '" + type + "' outside [0, 1]: " + std::to_string(acc));
      }
      if (acc > best_acc) {
        best_acc = acc;
        best = p;
      }
    }
    out.mapping.emplace(type, best);
  }
  out.provenance = table;
  return out;
}

Preset route_type(const RoutingTable& table, const std::string& type, double lambda) {
  const auto it = table.mapping.find(type);
  if (it == table.mapping.end()) {
    throw Error(ErrorKind::RoutingGap, "routing table has no entry for type '" + type + "'");
  }
  return make_preset(it->second, lambda);
}

Preset route(const QuestionTypeModel& model, const RoutingTable& table, std::string_view text,
             double lambda) {
  return route_type(table, predict_type(model, text).type, lambda);
}

std::vector<LabeledQuestion> parse_training_tsv(std::string_view content) {
  std::vector<LabeledQuestion> out;
  std::size_t line_no = 0;
  for (auto line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorKind::Format,
                  "training line " + std::to_string(line_no) + " has no tab separator");
    }
    LabeledQuestion q{trim(line.substr(0, tab)), std::string(line.substr(tab + 1))};
    if (q.type.empty()) {
      throw Error(ErrorKind::Format, "training line " + std::to_string(line_no) + " has no type");
    }
    out.push_back(std::move(q));
  }
  return out;
}

AccuracyTable parse_accuracy_csv(std::string_view content) {
  const auto lines = split_lines(content);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw Error(ErrorKind::IncompleteTable, "accuracy CSV is empty");

  const auto header = split_csv(lines[first]);
  if (header.empty() || header[0] != "type") {
    throw Error(ErrorKind::IncompleteTable, "accuracy CSV header must start with 'type'");
  }
  std::vector<PresetName> columns;
  for (std::size_t c = 1; c < header.size(); ++c) {
    try {
      columns.push_back(parse_preset_name(header[c]));
    } catch (const Error&) {
      throw Error(ErrorKind::IncompleteTable, "unknown accuracy column '" + header[c] + "'");
    }
  }
  for (PresetName p : kPresetOrder) {
    if (std::find(columns.begin(), columns.end(), p) == columns.end()) {
      throw Error(ErrorKind::IncompleteTable,
                  "accuracy CSV lacks column " + std::string(to_string(p)));
    }
  }

  AccuracyTable table;
  for (std::size_t l = first + 1; l < lines.size(); ++l) {
    if (trim(lines[l]).empty()) continue;
    const auto cells = split_csv(lines[l]);
    const std::string where = "accuracy CSV line " + std::to_string(l + 1);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::IncompleteTable, where + " has " + std::to_string(cells.size()) +
                                                  " cells, header has " +
                                                  std::to_string(header.size()));
    }
    if (cells[0].empty()) throw Error(ErrorKind::IncompleteTable, where + " has no type");
    if (table.count(cells[0])) {
      throw Error(ErrorKind::Format, where + " repeats type '" + cells[0] + "'");
    }
    auto& row = table[cells[0]];
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw Error(ErrorKind::IncompleteTable,
                    where + " is missing " + std::string(to_string(columns[c - 1])));
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size()) {
        throw Error(ErrorKind::Format, where + " has non-numeric accuracy '" + cells[c] + "'");
      }
      row[columns[c - 1]] = v;
    }
  }
  if (table.empty()) throw Error(ErrorKind::IncompleteTable, "accuracy CSV has no rows");
  return table;
}

}  // namespace framesel
